#include <gtest/gtest.h>

#include <random>

#include "twistbench/graph_core.hpp"
#include "twistbench/random_inputs.hpp"

using namespace twistbench;

namespace {

SimplicialGraph path3() { return SimplicialGraph({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}}); }
SimplicialGraph square() {
  return SimplicialGraph({"a", "b", "c", "d"}, {{"a", "b"}, {"b", "c"}, {"c", "d"}, {"d", "a"}});
}

// Join test by definition: some bipartition with all cross edges present.
bool join_by_bipartition(const SimplicialGraph& g, const VertexSet& s) {
  auto es = s.elements();
  if (es.size() < 2) return false;
  for (std::uint64_t m = 1; m + 1 < (std::uint64_t{1} << es.size()); ++m) {
    bool ok = true;
    for (std::size_t i = 0; i < es.size() && ok; ++i)
      for (std::size_t j = 0; j < es.size() && ok; ++j)
        if (((m >> i) & 1u) && !((m >> j) & 1u) && !g.adjacent(es[i], es[j])) ok = false;
    if (ok) return true;
  }
  return false;
}

}  // namespace

TEST(VertexSet, SetAlgebra) {
  auto a = VertexSet::of(5, {0, 1, 2}), b = VertexSet::of(5, {2, 3});
  EXPECT_EQ((a | b).size(), 4u);
  EXPECT_EQ((a & b), VertexSet::of(5, {2}));
  EXPECT_EQ((a - b), VertexSet::of(5, {0, 1}));
  EXPECT_TRUE(VertexSet::of(5, {1}).subset_of(a));
  EXPECT_TRUE(a.intersects(b));
  EXPECT_EQ(VertexSet::from_mask(5, 0b101), VertexSet::of(5, {0, 2}));
}

TEST(SimplicialGraph, RejectsMalformedInput) {
  EXPECT_THROW(SimplicialGraph({"a", "a"}, {}), InputError);
  EXPECT_THROW(SimplicialGraph({"a", "b"}, {{"a", "a"}}), InputError);
  EXPECT_THROW(SimplicialGraph({"a", "b"}, {{"a", "x"}}), InputError);
  EXPECT_THROW(SimplicialGraph({"a", "b"}, {{"a", "b"}, {"b", "a"}}), InputError);
  EXPECT_THROW(graph_from_json(nlohmann::json::array()), InputError);
}

TEST(SimplicialGraph, JsonRoundTrip) {
  auto g = square();
  EXPECT_EQ(graph_from_json(graph_to_json(g)), g);
}

TEST(Stars, PathExamples) {
  auto g = path3();
  Vertex a = g.index_of("a"), b = g.index_of("b"), c = g.index_of("c");
  EXPECT_EQ(link(g, a), g.set_of({"b"}));
  EXPECT_EQ(star(g, b), g.all());
  EXPECT_EQ(kappa(g, a), g.set_of({"a", "b"}));
  EXPECT_EQ(kappa(g, b), g.set_of({"b"}));
  EXPECT_TRUE(is_intersection_of_stars(g, g.set_of({"b"})));
  EXPECT_FALSE(is_intersection_of_stars(g, g.set_of({"a", "c"})));
  (void)c;
}

TEST(Stars, KappaIsAClique) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    auto g = inputs::random_graph(6, 0.5, rng);
    for (Vertex v = 0; v < g->size(); ++v) {
      auto k = kappa(*g, v);
      EXPECT_TRUE(k.contains(v));
      EXPECT_TRUE(is_clique(*g, k));
    }
  }
}

TEST(Stars, StarClosureMatchesBruteForce) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 100; ++t) {
    auto g = inputs::random_graph(5, 0.5, rng);
    for_each_subset(g->all(), [&](const VertexSet& s) {
      VertexSet cl = g->all();
      for (Vertex u = 0; u < g->size(); ++u) {
        bool contains = true;
        for (Vertex x : s.elements()) contains = contains && (x == u || g->adjacent(x, u));
        if (contains) cl = cl & star(*g, u);
      }
      EXPECT_EQ(star_closure(*g, s), cl);
    });
  }
}

TEST(Joins, ComplementComponentsDetectJoins) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    auto g = inputs::random_graph(6, 0.6, rng);
    for_each_subset(g->all(), [&](const VertexSet& s) { EXPECT_EQ(is_join(*g, s), join_by_bipartition(*g, s)); });
  }
}

TEST(Joins, DecompositionOfSquare) {
  auto g = square();
  auto jd = join_decomposition(g, g.all());
  EXPECT_TRUE(jd.clique_part.empty());
  ASSERT_EQ(jd.irreducible.size(), 2u);
  EXPECT_EQ(jd.irreducible[0] | jd.irreducible[1], g.all());
  EXPECT_THROW(join_decomposition(g, g.empty_set()), InputError);
}

TEST(Joins, CliqueIsAllCliquePart) {
  auto g = inputs::complete_graph(4);
  auto jd = join_decomposition(*g, g->all());
  EXPECT_EQ(jd.clique_part, g->all());
  EXPECT_TRUE(jd.irreducible.empty());
}

TEST(Components, EdgelessGraph) {
  auto g = inputs::edgeless_graph(3);
  EXPECT_EQ(components(*g, g->all()).size(), 3u);
  EXPECT_EQ(orthogonal(*g, VertexSet::of(3, {0})).size(), 0u);
}

TEST(Enumeration, IsomorphismClassCounts) {
  const std::size_t expected[] = {1, 2, 4, 11, 34};
  for (std::size_t n = 1; n <= 5; ++n) EXPECT_EQ(inputs::graphs_up_to_isomorphism(n).size(), expected[n - 1]);
}
