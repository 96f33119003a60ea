#include <gtest/gtest.h>

#include <random>

#include "twistbench/splitting_shortener.hpp"

using namespace twistbench;

namespace {

FPWord word(const FreeProductSpec& sp, std::vector<std::string> toks) { return fp_parse_tokens(sp, toks); }

FPWord random_fp(const FreeProductSpec& sp, int syllables, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> src(0, sp.sources() - 1);
  std::uniform_int_distribution<long> ex(-2, 2);
  std::vector<Syllable> raw;
  for (int i = 0; i < syllables; ++i) raw.push_back({src(rng), ex(rng)});
  return fp_normalize(sp, raw);
}

std::vector<TVertex> tree_neighbours(const FreeProductSpec& sp, const TVertex& v) {
  std::vector<TVertex> out;
  if (v.type == 0) {
    for (int i = 0; i < sp.factors(); ++i) out.push_back(t_canonical(sp, {v.g, i + 1}));
    for (int j = 0; j < sp.free_rank; ++j)
      for (long e : {1L, -1L}) out.push_back({fp_mul(sp, v.g, fp_gen(sp, sp.factors() + j, e)), 0});
  } else {
    for (long k = 0; k < sp.order(v.type - 1); ++k) out.push_back({fp_mul(sp, v.g, fp_gen(sp, v.type - 1, k)), 0});
  }
  return out;
}

std::vector<TVertex> ball_vertices(const FreeProductSpec& sp, long radius) {
  std::map<TVertex, long> dist{{TVertex{}, 0}};
  std::vector<TVertex> order{TVertex{}};
  for (std::size_t k = 0; k < order.size(); ++k) {
    auto v = order[k];
    if (dist[v] == radius) continue;
    for (auto& n : tree_neighbours(sp, v))
      if (dist.emplace(n, dist[v] + 1).second) order.push_back(n);
  }
  return order;
}

long displacement(const FreeProductSpec& sp, const FPWord& g, const TVertex& v) {
  return tree_distance(sp, v, t_canonical(sp, translate(sp, g, v)));
}

// Brute force over connected vertex subsets of the ball: fewest edges of a
// subtree meeting each descriptor's minimal set (single-element descriptors),
// or containing ℓ consecutive minimal vertices for C-indexed ones.
long brute_sigma(const FreeProductSpec& sp, const GrushkoTriple& t, long radius) {
  auto ball = ball_vertices(sp, radius);
  const std::size_t n = ball.size();
  std::vector<std::vector<bool>> minimal(t.descriptors.size(), std::vector<bool>(n, false));
  std::vector<long> lengths;
  for (std::size_t i = 0; i < t.descriptors.size(); ++i) {
    const auto& g = t.descriptors[i][0];
    const long best = fp_tree_translation_length(sp, g);
    lengths.push_back(best);
    for (std::size_t k = 0; k < n; ++k) minimal[i][k] = displacement(sp, g, ball[k]) == best;
  }
  long answer = -1;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<std::size_t> in;
    for (std::size_t k = 0; k < n; ++k)
      if ((mask >> k) & 1u) in.push_back(k);
    long edges = 0;
    for (std::size_t p = 0; p < in.size(); ++p)
      for (std::size_t q = p + 1; q < in.size(); ++q)
        if (tree_distance(sp, ball[in[p]], ball[in[q]]) == 1) ++edges;
    if (edges != static_cast<long>(in.size()) - 1) continue;  // not connected
    bool ok = true;
    for (std::size_t i = 0; i < t.descriptors.size() && ok; ++i) {
      long hits = 0;
      for (auto k : in) hits += minimal[i][k] ? 1 : 0;
      ok = t.in_c[i] ? hits >= std::max(1L, lengths[i]) : hits >= 1;
    }
    if (ok && (answer < 0 || edges < answer)) answer = edges;
  }
  return answer;
}

}  // namespace

TEST(Generators, Counts) {
  auto sp = make_spec({2, 3}, 1);
  auto gens = fr_generators(sp);
  EXPECT_EQ(gens.fr0.size(), 13u);
  EXPECT_EQ(gens.inversions.size(), 1u);
  EXPECT_EQ(fr_generators(make_spec({2, 3}, 0)).fr0.size(), 3u);
}

TEST(Generators, ImagesAndInverses) {
  auto sp = make_spec({2, 3}, 1);
  FRGen c{FRGen::Kind::Conjugate, 0, fp_gen(sp, 2)};
  EXPECT_EQ(apply_gen(sp, c, fp_gen(sp, 0)), word(sp, {"t", "x", "-t"}));
  FRGen l{FRGen::Kind::LeftMultiply, 0, fp_gen(sp, 1)};
  EXPECT_EQ(apply_gen(sp, l, fp_gen(sp, 2)), word(sp, {"y", "t"}));
  for (const auto& g : fr_generators(sp).fr0)
    for (int s = 0; s < sp.sources(); ++s)
      EXPECT_EQ(apply_gen(sp, inverse_gen(sp, g), apply_gen(sp, g, fp_gen(sp, s))), fp_gen(sp, s)) << describe(sp, g);
}

TEST(FRAutomorphisms, CompositesVerifyAndInvert) {
  std::mt19937_64 rng(61);
  for (auto sp : {make_spec({2, 3}, 1), make_spec({2, 2}, 1), make_spec({3}, 2)})
    for (int k = 0; k < 40; ++k) {
      auto phi = random_fr_aut(sp, 5, rng, k % 2 == 0);
      EXPECT_TRUE(phi.verify(sp));
      EXPECT_EQ(phi.in_fr0(), std::none_of(phi.word.begin(), phi.word.end(),
                                           [](const FRGen& g) { return g.kind == FRGen::Kind::Invert; }));
      auto inv = phi.inverse(sp);
      for (int s = 0; s < sp.sources(); ++s) EXPECT_EQ(phi.apply(sp, inv.apply(sp, fp_gen(sp, s))), fp_gen(sp, s));
      EXPECT_EQ(fr_from_word(sp, phi.word).images, phi.images);
      auto w = random_fp(sp, 4, rng);
      EXPECT_EQ(fp_tree_translation_length(sp, phi.apply(sp, w)) == 0, fp_is_elliptic(sp, w));
    }
}

TEST(FRAutomorphisms, FactorConjugator) {
  auto sp = make_spec({2, 3}, 1);
  EXPECT_EQ(*factor_conjugator(sp, word(sp, {"t", "x", "-t"}), 0), fp_gen(sp, 2));
  EXPECT_FALSE(factor_conjugator(sp, word(sp, {"x", "y"}), 0).has_value());
  EXPECT_FALSE(factor_conjugator(sp, word(sp, {"y"}), 0).has_value());
  auto j = fr_to_json(sp, FRAut::identity(sp));
  EXPECT_TRUE(j["in_fr0"].get<bool>());
}

TEST(GrushkoTriples, Moves) {
  auto sp = make_spec({2, 3}, 1);
  auto t = defining_triple(sp);
  EXPECT_EQ(t.kappa(), std::make_pair(std::size_t{3}, std::size_t{1}));
  auto d = grushko_move(t, {GrushkoMove::Kind::MakeD, 2, 0});
  EXPECT_EQ(d.kappa(), std::make_pair(std::size_t{3}, std::size_t{0}));
  auto m = grushko_move(d, {GrushkoMove::Kind::Merge, 0, 2});
  EXPECT_EQ(m.kappa(), std::make_pair(std::size_t{2}, std::size_t{0}));
  EXPECT_EQ(m.descriptors[0].size(), 2u);
  EXPECT_THROW(grushko_move(t, {GrushkoMove::Kind::MakeD, 0, 0}), InputError);
  EXPECT_THROW(grushko_move(t, {GrushkoMove::Kind::Merge, 0, 2}), InputError);
  GrushkoTriple bad{{{fp_gen(sp, 0)}}, {true}};
  EXPECT_THROW(bad.validate(sp), InputError);
}

TEST(Sigma, DefiningTriples) {
  auto sp = make_spec({2, 3}, 0);
  auto s = sigma_T(sp, defining_triple(sp), 3);
  EXPECT_EQ(s.value, 2);
  EXPECT_TRUE(s.certified);
  GrushkoTriple one{{{fp_gen(sp, 0)}}, {false}};
  EXPECT_EQ(sigma_T(sp, one, 3).value, 0);
  GrushkoTriple far{{{fp_conj(sp, word(sp, {"x", "y", "x", "y"}), fp_gen(sp, 0))}}, {false}};
  EXPECT_EQ(sigma_T(sp, far, 2).value, -1);
  EXPECT_THROW(sigma_T(sp, one, -1), InputError);
}

TEST(Sigma, MatchesSubtreeBruteForce) {
  std::mt19937_64 rng(62);
  auto sp = make_spec({2, 3}, 0);
  ASSERT_EQ(ball_vertices(sp, 3).size(), 9u);
  int compared = 0;
  for (int k = 0; k < 200; ++k) {
    GrushkoTriple t;
    for (int d = 0; d < 2; ++d) {
      auto w = random_fp(sp, 1 + static_cast<int>(rng() % 3), rng);
      if (w.is_identity()) w = fp_gen(sp, 1);
      t.descriptors.push_back({w});
      t.in_c.push_back(false);
    }
    auto s = sigma_T(sp, t, 3);
    EXPECT_EQ(s.value, brute_sigma(sp, t, 3));
    ++compared;
  }
  EXPECT_EQ(compared, 200);
}

TEST(Sigma, CIndexedMatchesBruteForce) {
  auto sp = make_spec({2}, 1);
  GrushkoTriple t{{{fp_gen(sp, 0)}, {fp_gen(sp, 1)}}, {false, true}};
  EXPECT_EQ(sigma_T(sp, t, 3).value, brute_sigma(sp, t, 3));
  GrushkoTriple u{{{fp_gen(sp, 0)}, {word(sp, {"t", "x"})}}, {false, true}};
  EXPECT_EQ(sigma_T(sp, u, 3).value, brute_sigma(sp, u, 3));
}

TEST(Sigma, ConjugationEquivariance) {
  std::mt19937_64 rng(63);
  auto sp = make_spec({2, 3}, 1);
  auto base = defining_triple(sp);
  auto s0 = sigma_T(sp, base, 3);
  for (int k = 0; k < 20; ++k) {
    auto g = random_fp(sp, 3, rng);
    auto moved = conjugate_triple(sp, base, g);
    auto s = sigma_T(sp, moved, 3, t_canonical(sp, {g, 0}));
    EXPECT_EQ(s.value, s0.value);
  }
}

TEST(Predicates, Overlap) {
  auto sp = make_spec({2, 3}, 0);
  auto x = fp_gen(sp, 0), y = fp_gen(sp, 1);
  // x and y fix adjacent-but-distinct vertices: no shared vertex or edge.
  EXPECT_FALSE(descriptors_overlap(sp, {x}, {y}));
  EXPECT_TRUE(descriptors_overlap(sp, {x}, {x}));
  EXPECT_TRUE(descriptors_overlap(sp, {fp_mul(sp, x, y)}, {fp_mul(sp, y, x)}));
}

TEST(Predicates, BoringArcs) {
  auto sp = make_spec({2, 3}, 1);
  auto t = fp_gen(sp, 2);
  auto c = boring_arc_check(sp, t, 1);
  EXPECT_GT(c.arcs, 0);
  EXPECT_TRUE(c.holds);
  EXPECT_EQ(c.threshold, 6);
  EXPECT_EQ(boring_arc_check(sp, fp_gen(sp, 0), 1).arcs, 0);
}

TEST(BoundConstant, ValuesAndOverflow) {
  EXPECT_EQ(bound_constant(2, 0, 4, 2), 192000);
  EXPECT_EQ(bound_constant(0, 1, 1, 1), 9216);
  EXPECT_LT(bound_constant(1, 0, 2, 2), bound_constant(2, 0, 2, 2));
  EXPECT_LT(bound_constant(1, 0, 2, 2), bound_constant(1, 0, 3, 2));
  EXPECT_LT(bound_constant(1, 0, 2, 2), bound_constant(1, 0, 2, 3));
  EXPECT_THROW(bound_constant(0, 0, 1, 1), InputError);
  EXPECT_THROW(bound_constant(40, 10, 100, 50), ContractError);
}

TEST(Shorten, StandardSetIsAlreadyShort) {
  auto sp = make_spec({2, 3}, 0);
  auto r = shorten(sp);
  EXPECT_TRUE(r.phi.is_identity(sp));
  EXPECT_EQ(r.report.s_final, r.report.s_initial);
  EXPECT_TRUE(r.report.within_bound);
  EXPECT_EQ(r.report.D, 1);
  auto j = shorten_to_json(sp, r);
  EXPECT_EQ(j["provenance"], "search-with-cap");
}

TEST(Shorten, UndoesConjugationScrambles) {
  auto sp = make_spec({2, 3}, 1);
  auto std_set = standard_set(sp);
  FRGen c{FRGen::Kind::Conjugate, 0, fp_gen(sp, 2)};
  FRGen l{FRGen::Kind::LeftMultiply, 0, fp_gen(sp, 1)};
  auto scramble = fr_from_word(sp, {c, l, c});
  auto input = scramble.apply(sp, std_set);
  auto r = shorten(sp, input);
  EXPECT_EQ(r.phi.apply(sp, input), r.image);
  EXPECT_TRUE(r.phi.verify(sp));
  EXPECT_TRUE(r.phi.in_fr0());
  EXPECT_LE(r.report.s_final, r.report.s_initial);
  EXPECT_TRUE(r.report.within_bound);
  for (std::size_t k = 1; k < r.report.s_history.size(); ++k) EXPECT_LE(r.report.s_history[k], r.report.s_history[k - 1]);
  for (std::size_t k = 1; k < r.report.kappa_history.size(); ++k)
    EXPECT_LT(r.report.kappa_history[k], r.report.kappa_history[k - 1]);
}

TEST(Shorten, RandomInputsStayWithinBound) {
  std::mt19937_64 rng(64);
  auto sp = make_spec({2, 2}, 1);
  for (int k = 0; k < 5; ++k) {
    auto input = random_fr_aut(sp, 3, rng, false).apply(sp, standard_set(sp));
    auto r = shorten(sp, input);
    EXPECT_TRUE(r.report.within_bound);
    EXPECT_LE(r.report.s_final, s_functional(sp, input, 3).value);
  }
}

TEST(Shorten, RejectsBadInput) {
  auto sp = make_spec({2, 3}, 0);
  EXPECT_THROW(shorten(sp, std::vector<FPWord>{fp_gen(sp, 0)}), InputError);
  ShortenBudget b;
  b.beam_width = 0;
  EXPECT_THROW(shorten(sp, {}, b), InputError);
}
