#pragma once

// Deterministic input generators shared by the acceptance runner, the CLI
// and the tests.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "twistbench/graph_core.hpp"
#include "twistbench/matrix_lab.hpp"
#include "twistbench/raag_words.hpp"

namespace twistbench::inputs {

inline std::vector<std::string> letter_labels(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(i < 26 ? std::string(1, static_cast<char>('a' + i)) : "v" + std::to_string(i));
  return out;
}

inline GraphPtr make_graph(std::size_t n, const std::vector<std::pair<Vertex, Vertex>>& edges) {
  return std::make_shared<const SimplicialGraph>(SimplicialGraph::from_indices(letter_labels(n), edges));
}

inline GraphPtr path_graph(std::size_t n) {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (Vertex i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return make_graph(n, e);
}

inline GraphPtr cycle_graph(std::size_t n) {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (Vertex i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return make_graph(n, e);
}

inline GraphPtr complete_graph(std::size_t n) {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (Vertex i = 0; i < n; ++i)
    for (Vertex j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return make_graph(n, e);
}

inline GraphPtr edgeless_graph(std::size_t n) { return make_graph(n, {}); }

/// Centre 0 joined to leaves 1..n-1.
inline GraphPtr star_graph(std::size_t n) {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (Vertex i = 1; i < n; ++i) e.emplace_back(0, i);
  return make_graph(n, e);
}

/// Path a-b-c-d plus an apex joined to all of it.
inline GraphPtr path_with_apex() {
  return std::make_shared<const SimplicialGraph>(SimplicialGraph(
      {"a", "b", "c", "d", "z"}, {{"a", "b"}, {"b", "c"}, {"c", "d"}, {"a", "z"}, {"b", "z"}, {"c", "z"}, {"d", "z"}}));
}

inline GraphPtr random_graph(std::size_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<std::pair<Vertex, Vertex>> e;
  for (Vertex i = 0; i < n; ++i)
    for (Vertex j = i + 1; j < n; ++j)
      if (coin(rng)) e.emplace_back(i, j);
  return make_graph(n, e);
}

/// One representative per isomorphism class of graphs on n vertices.
inline std::vector<GraphPtr> graphs_up_to_isomorphism(std::size_t n) {
  std::vector<std::pair<Vertex, Vertex>> slots;
  for (Vertex i = 0; i < n; ++i)
    for (Vertex j = i + 1; j < n; ++j) slots.emplace_back(i, j);
  std::vector<std::vector<std::size_t>> slot_index(n, std::vector<std::size_t>(n, 0));
  for (std::size_t k = 0; k < slots.size(); ++k) {
    slot_index[slots[k].first][slots[k].second] = k;
    slot_index[slots[k].second][slots[k].first] = k;
  }
  std::vector<std::vector<Vertex>> perms;
  std::vector<Vertex> p(n);
  std::iota(p.begin(), p.end(), Vertex{0});
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));

  std::set<std::uint32_t> seen;
  std::vector<GraphPtr> out;
  const std::uint32_t total = std::uint32_t{1} << slots.size();
  for (std::uint32_t mask = 0; mask < total; ++mask) {
    std::uint32_t canon = mask;
    for (const auto& q : perms) {
      std::uint32_t img = 0;
      for (std::size_t k = 0; k < slots.size(); ++k)
        if ((mask >> k) & 1u) img |= std::uint32_t{1} << slot_index[q[slots[k].first]][q[slots[k].second]];
      canon = std::min(canon, img);
    }
    if (!seen.insert(canon).second) continue;
    std::vector<std::pair<Vertex, Vertex>> e;
    for (std::size_t k = 0; k < slots.size(); ++k)
      if ((canon >> k) & 1u) e.push_back(slots[k]);
    out.push_back(make_graph(n, e));
  }
  return out;
}

inline Letters random_letters(const SimplicialGraph& g, std::size_t len, std::mt19937_64& rng) {
  std::uniform_int_distribution<Vertex> vert(0, g.size() - 1);
  std::bernoulli_distribution coin(0.5);
  Letters out;
  for (std::size_t i = 0; i < len; ++i) out.push_back({vert(rng), coin(rng) ? 1 : -1});
  return out;
}

inline NormalWord random_word(const GraphPtr& g, std::size_t max_len, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  return NormalWord(g, random_letters(*g, len(rng), rng));
}

/// Full-rank sublattice of Z^dim with `rank` rows and entries in [-bound, bound].
inline IntLattice random_lattice(std::size_t dim, std::size_t rank, Int bound, std::mt19937_64& rng) {
  std::uniform_int_distribution<Int> entry(-bound, bound);
  for (;;) {
    IntMatrix rows(rank, IntVector(dim));
    for (auto& r : rows)
      for (auto& x : r) x = entry(rng);
    if (matrix_rank(rows) == rank) return IntLattice(dim, rows);
  }
}

}  // namespace twistbench::inputs
