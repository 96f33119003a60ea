#include <gtest/gtest.h>

#include <map>
#include <queue>
#include <random>

#include "twistbench/random_inputs.hpp"
#include "twistbench/raag_words.hpp"

using namespace twistbench;

namespace {

GraphPtr square() { return inputs::cycle_graph(4); }  // a-b-c-d-a
GraphPtr path3() { return inputs::path_graph(3); }

NormalWord w(const GraphPtr& g, const std::string& s) { return parse_word(g, s); }

// Cayley-graph BFS: element (as normal form) -> word length.
std::map<NormalWord, std::size_t> cayley_ball(const GraphPtr& g, std::size_t radius) {
  std::map<NormalWord, std::size_t> dist{{identity(g), 0}};
  std::queue<NormalWord> q;
  q.push(identity(g));
  while (!q.empty()) {
    auto u = q.front();
    q.pop();
    if (dist[u] == radius) continue;
    for (Vertex v = 0; v < g->size(); ++v)
      for (int s : {1, -1}) {
        auto n = multiply(u, NormalWord::generator(g, v, s));
        if (dist.emplace(n, dist[u] + 1).second) q.push(n);
      }
  }
  return dist;
}

// Brute-force 𝔱 over all group elements of length ≤ R.
std::size_t brute_t(const FiniteSubset& omega, std::size_t radius) {
  const auto& g = omega.elements().front().graph_ptr();
  std::size_t best = SIZE_MAX;
  for (const auto& [x, d] : cayley_ball(g, radius)) {
    std::size_t m = 0;
    for (const auto& s : omega.elements()) m = std::max(m, multiply(multiply(invert(x), s), x).length());
    best = std::min(best, m);
  }
  return best;
}

}  // namespace

TEST(NormalForm, Examples) {
  auto sq = square();
  EXPECT_EQ(word_to_json(w(sq, "b a")), nlohmann::json({"a", "b"}));
  EXPECT_TRUE(w(sq, "a -a").is_identity());
  auto p = path3();
  EXPECT_EQ(w(p, "a c -a").length(), 3u);
}

TEST(NormalForm, IdempotentAndShuffleInvariant) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 300; ++t) {
    auto g = inputs::random_graph(5, 0.5, rng);
    auto raw = inputs::random_letters(*g, 10, rng);
    NormalWord u(g, raw);
    EXPECT_EQ(NormalWord(g, u.letters()), u);
    // Swapping an adjacent commuting pair does not change the element.
    for (std::size_t i = 0; i + 1 < raw.size(); ++i)
      if (raw[i].vertex != raw[i + 1].vertex && g->adjacent(raw[i].vertex, raw[i + 1].vertex)) {
        auto swapped = raw;
        std::swap(swapped[i], swapped[i + 1]);
        EXPECT_EQ(NormalWord(g, swapped), u);
      }
  }
}

TEST(NormalForm, LengthMatchesCayleyBallOracle) {
  for (auto g : {square(), path3(), inputs::edgeless_graph(2), inputs::complete_graph(3)}) {
    auto ball = cayley_ball(g, 4);
    for (const auto& [u, d] : ball) EXPECT_EQ(u.length(), d);
  }
}

TEST(NormalForm, RejectsForeignLetters) {
  auto g = path3();
  EXPECT_THROW(NormalWord(g, Letters{{7, 1}}), InputError);
  EXPECT_THROW(word_from_json(g, nlohmann::json({"q"})), InputError);
  EXPECT_THROW(word_from_json(g, nlohmann::json("a")), InputError);
  EXPECT_THROW(check_same_graph(identity(g), identity(square())), InputError);
}

TEST(Arithmetic, GroupLaws) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 200; ++t) {
    auto g = inputs::random_graph(4, 0.5, rng);
    auto a = inputs::random_word(g, 6, rng), b = inputs::random_word(g, 6, rng), c = inputs::random_word(g, 6, rng);
    EXPECT_EQ(multiply(multiply(a, b), c), multiply(a, multiply(b, c)));
    EXPECT_TRUE(multiply(a, invert(a)).is_identity());
    EXPECT_EQ(invert(multiply(a, b)), multiply(invert(b), invert(a)));
    EXPECT_EQ(power(a, 3), multiply(a, multiply(a, a)));
    EXPECT_EQ(power(a, -2), invert(multiply(a, a)));
  }
}

TEST(Arithmetic, Examples) {
  auto sq = square();
  EXPECT_EQ(conjugate(w(sq, "a"), w(sq, "b")), w(sq, "a"));
  EXPECT_EQ(invert(w(sq, "a b")), w(sq, "-b -a"));
  EXPECT_TRUE(commutator(w(sq, "a"), w(sq, "b")).is_identity());
  EXPECT_FALSE(commutator(w(sq, "a"), w(sq, "c")).is_identity());
}

TEST(CyclicReduction, Examples) {
  auto p = path3();
  auto r = cyclically_reduce(w(p, "a c -a"));
  EXPECT_EQ(r.core, w(p, "c"));
  EXPECT_EQ(r.conjugator, w(p, "a"));
  EXPECT_TRUE(cyclically_reduce(w(p, "a")).conjugator.is_identity());
  EXPECT_EQ(trans_len_X(w(p, "a c a")), 3u);
  auto sq = square();
  auto u = w(sq, "a b a");
  EXPECT_EQ(trans_len_X(u), 3u);
  EXPECT_EQ(trans_len_Tv(u, 0), 2u);
  EXPECT_EQ(trans_len_Tv(u, 1), 1u);
  EXPECT_EQ(trans_len_X(identity(sq)), 0u);
}

TEST(CyclicReduction, CoreIsMinimalAmongConjugates) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 100; ++t) {
    auto g = inputs::random_graph(4, 0.5, rng);
    auto u = inputs::random_word(g, 6, rng);
    auto r = cyclically_reduce(u);
    EXPECT_EQ(multiply(multiply(r.conjugator, r.core), invert(r.conjugator)), u);
    for (const auto& [x, d] : cayley_ball(g, 3)) EXPECT_GE(conjugate(u, x).length(), r.core.length());
  }
}

TEST(Functionals, SmallExamples) {
  auto sq = square();
  FiniteSubset omega({identity(sq), w(sq, "a")});
  auto sq2 = square_set(omega);
  EXPECT_EQ(sq2.size(), 3u);
  EXPECT_EQ(ell_set(sq2), 3u);
  auto d = t_displacement(omega, 2);
  EXPECT_EQ(d.value, 1u);
  EXPECT_TRUE(d.certified);
  FiniteSubset one({identity(sq)});
  EXPECT_EQ(t_displacement(one, 1).value, 0u);
  EXPECT_EQ(ell_set(square_set(one)), 0u);
  EXPECT_THROW(t_displacement(one, -1), InputError);
  EXPECT_THROW(t_displacement(FiniteSubset{}, 1), InputError);
}

TEST(Functionals, DisplacementMatchesBruteForce) {
  std::mt19937_64 rng(14);
  for (int t = 0; t < 40; ++t) {
    auto g = inputs::random_graph(3, 0.5, rng);
    FiniteSubset omega({identity(g), inputs::random_word(g, 4, rng), inputs::random_word(g, 4, rng)});
    EXPECT_EQ(t_displacement(omega, 3).value, brute_t(omega, 3));
  }
}

TEST(Reference, Comparison) {
  auto sq = square();
  auto one = identity(sq), a = w(sq, "a"), b = w(sq, "b");
  ReferenceData ref;
  ref.levels = {{"H", FiniteSubset({one, a, invert(a)})}};
  ref.validate();
  std::vector<FiniteSubset> short_im{FiniteSubset({one, a, invert(a)})};
  std::vector<FiniteSubset> long_im{FiniteSubset({one, w(sq, "a c"), invert(w(sq, "a c"))})};
  EXPECT_EQ(compare_reference(short_im, short_im, ref), Comparison::Equivalent);
  EXPECT_EQ(compare_reference(short_im, long_im, ref), Comparison::Less);
  EXPECT_EQ(compare_reference(long_im, short_im, ref), Comparison::Greater);
  ReferenceData bad;
  bad.levels = {{"H", FiniteSubset({a})}};
  EXPECT_THROW(bad.validate(), InputError);
  (void)b;
}
