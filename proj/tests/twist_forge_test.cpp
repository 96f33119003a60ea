#include <gtest/gtest.h>

#include <random>

#include "twistbench/random_inputs.hpp"
#include "twistbench/twist_forge.hpp"

using namespace twistbench;

namespace {

GraphPtr path3() { return inputs::path_graph(3); }
NormalWord w(const GraphPtr& g, const std::string& s) { return parse_word(g, s); }

bool is_identity_aut(const RaagAut& f) {
  for (Vertex v = 0; v < f.graph().size(); ++v)
    if (!(f.image(v) == NormalWord::generator(f.graph_ptr(), v))) return false;
  return true;
}

std::size_t count_kind(const std::vector<RaagAut>& gens, AutKind k) {
  return static_cast<std::size_t>(
      std::count_if(gens.begin(), gens.end(), [k](const RaagAut& f) { return f.tag().kind == k; }));
}

}  // namespace

TEST(Generators, FreeGroupHasBothTransvections) {
  auto g = inputs::edgeless_graph(2);
  auto gens = ls_generators(g);
  EXPECT_EQ(count_kind(gens, AutKind::Transvection), 2u);
}

TEST(Generators, FreeAbelianHasNoPartialConjugations) {
  auto gens = ls_generators(inputs::complete_graph(2));
  EXPECT_EQ(count_kind(gens, AutKind::Transvection), 2u);
  EXPECT_EQ(count_kind(gens, AutKind::PartialConjugation), 0u);
}

TEST(Generators, PathHasFoldButNoPartialConjugation) {
  auto g = path3();
  auto gens = ls_generators(g);
  bool fold = false;
  for (const auto& f : gens)
    if (f.tag().kind == AutKind::Transvection && f.tag().v == 0 && f.tag().w == 2) fold = true;
  EXPECT_TRUE(fold);
  // Removing St(b) leaves nothing, removing St(a) leaves the single vertex c.
  EXPECT_EQ(count_kind(gens, AutKind::PartialConjugation), 0u);
}

TEST(Generators, StarGraphPartialConjugations) {
  // Centre a with leaves b, c, d: St(b) = {a, b} leaves {c}, {d}.
  auto g = inputs::star_graph(4);
  auto gens = ls_generators(g);
  EXPECT_EQ(count_kind(gens, AutKind::PartialConjugation), 3u * 2u);
}

TEST(Generators, AllVerifyAndInvert) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 30; ++t) {
    auto g = inputs::random_graph(5, 0.4, rng);
    for (const auto& f : ls_generators(g)) {
      ASSERT_TRUE(f.verified());
      EXPECT_FALSE(f.check(*f.inverse_images()).has_value());
      EXPECT_TRUE(is_identity_aut(compose(f, inverse(f))));
    }
  }
}

TEST(Apply, Examples) {
  auto g = path3();
  auto tau = transvection(g, 0, 1);
  EXPECT_EQ(apply(tau, w(g, "a")), w(g, "a b"));
  auto free3 = inputs::edgeless_graph(3);
  auto pc = partial_conjugation(free3, 1, VertexSet::of(3, {0}));
  EXPECT_EQ(apply(pc, w(free3, "a c")), w(free3, "b a -b c"));
}

TEST(Apply, RejectsInvalidConstructions) {
  auto g = path3();
  EXPECT_THROW(transvection(g, 1, 0), ContractError);                         // lk(b) = {a, c} not in St(a)
  EXPECT_THROW(partial_conjugation(g, 1, VertexSet::of(3, {0})), ContractError);  // a lies in St(b)
  std::vector<NormalWord> bad{w(g, "a"), w(g, "a"), w(g, "c")};
  RaagAut f(g, bad, AutTag::of(AutKind::Composite));
  EXPECT_TRUE(f.check(bad).has_value());
  EXPECT_THROW(inverse(f), ContractError);
}

TEST(Twists, AmalgamExamples) {
  auto g = path3();
  auto spec = SplittingSpec::amalgam(*g, VertexSet::of(3, {0, 1}), VertexSet::of(3, {1, 2}));
  auto central = generic_dehn_twist(g, spec, TwistForm::AmalgamConj, w(g, "b"));
  EXPECT_TRUE(is_identity_aut(central));
  auto by_c = generic_dehn_twist(g, spec, TwistForm::AmalgamConj, w(g, "c"));
  EXPECT_EQ(by_c.image(1), w(g, "b"));
  EXPECT_EQ(by_c.image(2), w(g, "c"));
  EXPECT_EQ(by_c.image(0), w(g, "a"));
  EXPECT_THROW(generic_dehn_twist(g, spec, TwistForm::AmalgamConj, w(g, "a")), InputError);
  EXPECT_THROW(generic_dehn_twist(g, spec, TwistForm::HNNLeft, w(g, "b")), InputError);
}

TEST(Twists, HnnExample) {
  auto g = path3();
  auto spec = SplittingSpec::hnn(*g, 0);
  auto left = generic_dehn_twist(g, spec, TwistForm::HNNLeft, w(g, "b"));
  EXPECT_EQ(left.image(0), w(g, "b a"));
  EXPECT_TRUE(left.verified());
  auto right = generic_dehn_twist(g, spec, TwistForm::HNNRight, w(g, "c"));
  EXPECT_EQ(right.image(0), w(g, "a c"));
  EXPECT_THROW(generic_dehn_twist(g, spec, TwistForm::HNNLeft, w(g, "a")), InputError);
}

TEST(Taxonomy, Examples) {
  auto g = path3();
  EXPECT_EQ(classify_transvection(*g, 0, 2).verdict, TwistClass::CentraliserTwist);
  auto k2 = inputs::complete_graph(2);
  auto c = classify_transvection(*k2, 0, 1);
  EXPECT_EQ(c.verdict, TwistClass::AsceticTwist);
  EXPECT_EQ(c.witness, k2->all());
  auto sq = inputs::cycle_graph(4);
  EXPECT_EQ(classify_transvection(*sq, 0, 2).verdict, TwistClass::CentraliserTwist);
  EXPECT_THROW(classify_transvection(*g, 1, 0), ContractError);
}

TEST(Taxonomy, NoCentraliserTransvectionsOnCliques) {
  for (std::size_t n = 2; n <= 5; ++n) {
    auto g = inputs::complete_graph(n);
    for (Vertex v = 0; v < n; ++v)
      for (Vertex u = 0; u < n; ++u)
        if (u != v) {
          EXPECT_EQ(classify_transvection(*g, v, u).verdict, TwistClass::AsceticTwist);
        }
  }
}

TEST(Taxonomy, DehnTypes) {
  auto g = path3();
  auto fold = dt_type_transvection(*g, 0, 2);
  EXPECT_EQ(fold.type, DehnType::Fold);
  EXPECT_TRUE(fold.cmp);
  auto skew = dt_type_transvection(*inputs::complete_graph(2), 0, 1);
  EXPECT_EQ(skew.type, DehnType::Skew);
  EXPECT_FALSE(skew.cmp);
  auto free3 = inputs::edgeless_graph(3);
  auto pc = dt_type(partial_conjugation(free3, 1, VertexSet::of(3, {0})));
  EXPECT_EQ(pc.type, DehnType::PartialConjugation);
  EXPECT_TRUE(pc.cmp);
  EXPECT_THROW(dt_type(inversion(g, 0)), ContractError);
}

TEST(Wire, RoundTrip) {
  auto g = path3();
  auto f = transvection(g, 0, 2);
  auto back = aut_from_json(g, aut_to_json(f));
  EXPECT_EQ(back.images(), f.images());
  EXPECT_FALSE(back.verified());
  EXPECT_THROW(aut_from_json(g, nlohmann::json::array()), InputError);
}
