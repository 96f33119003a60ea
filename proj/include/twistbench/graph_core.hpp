#pragma once

// Finite simplicial graphs and the link / star / join combinatorics used by
// every other module.
//
// Vertices carry stable string labels externally and dense indices
// internally. Vertex sets are bitsets: a single 64-bit word for graphs with at
// most 64 vertices, a vector of words above that. Operations that enumerate
// subsets are limited to kMaxEnumerableVertices.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "twistbench/errors.hpp"

namespace twistbench {

using Vertex = std::size_t;

inline constexpr std::size_t kMaxEnumerableVertices = 20;

class VertexSet {
 public:
  VertexSet() = default;
  explicit VertexSet(std::size_t universe)
      : universe_(universe), words_((universe + 63) / 64, 0) {}

  static VertexSet full(std::size_t universe) {
    VertexSet s(universe);
    for (Vertex v = 0; v < universe; ++v) s.insert(v);
    return s;
  }
  static VertexSet of(std::size_t universe, std::initializer_list<Vertex> vs) {
    VertexSet s(universe);
    for (Vertex v : vs) s.insert(v);
    return s;
  }
  static VertexSet from_mask(std::size_t universe, std::uint64_t mask) {
    VertexSet s(universe);
    if (!s.words_.empty()) s.words_[0] = mask;
    return s;
  }

  std::size_t universe() const { return universe_; }
  bool contains(Vertex v) const {
    return v < universe_ && ((words_[v / 64] >> (v % 64)) & 1u);
  }
  void insert(Vertex v) { words_[v / 64] |= std::uint64_t{1} << (v % 64); }
  void erase(Vertex v) { words_[v / 64] &= ~(std::uint64_t{1} << (v % 64)); }

  std::size_t size() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  bool empty() const {
    return std::all_of(words_.begin(), words_.end(), [](auto w) { return w == 0; });
  }
  std::uint64_t mask() const { return words_.empty() ? 0 : words_[0]; }

  bool subset_of(const VertexSet& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~o.words_[i]) return false;
    return true;
  }
  bool intersects(const VertexSet& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & o.words_[i]) return true;
    return false;
  }

  VertexSet& operator|=(const VertexSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  VertexSet& operator&=(const VertexSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  VertexSet& operator-=(const VertexSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
    return *this;
  }
  friend VertexSet operator|(VertexSet a, const VertexSet& b) { return a |= b; }
  friend VertexSet operator&(VertexSet a, const VertexSet& b) { return a &= b; }
  friend VertexSet operator-(VertexSet a, const VertexSet& b) { return a -= b; }
  friend bool operator==(const VertexSet&, const VertexSet&) = default;
  friend bool operator<(const VertexSet& a, const VertexSet& b) {
    return std::lexicographical_compare(a.words_.rbegin(), a.words_.rend(),
                                        b.words_.rbegin(), b.words_.rend());
  }

  std::vector<Vertex> elements() const {
    std::vector<Vertex> out;
    for (Vertex v = 0; v < universe_; ++v)
      if (contains(v)) out.push_back(v);
    return out;
  }

 private:
  std::size_t universe_ = 0;
  std::vector<std::uint64_t> words_;
};

class SimplicialGraph {
 public:
  SimplicialGraph() = default;

  SimplicialGraph(std::vector<std::string> labels,
                  const std::vector<std::pair<std::string, std::string>>& edges)
      : labels_(std::move(labels)) {
    for (Vertex i = 0; i < labels_.size(); ++i) {
      if (!index_.emplace(labels_[i], i).second)
        throw InputError("duplicate vertex label '" + labels_[i] + "'");
      if (labels_[i].empty() || labels_[i][0] == '-')
        throw InputError("vertex labels must be nonempty and not start with '-'");
    }
    adjacency_.assign(labels_.size(), VertexSet(labels_.size()));
    for (const auto& [a, b] : edges) {
      Vertex u = index_of(a), w = index_of(b);
      if (u == w) throw InputError("self-loop at '" + a + "'");
      if (adjacency_[u].contains(w))
        throw InputError("duplicate edge '" + a + "'-'" + b + "'");
      adjacency_[u].insert(w);
      adjacency_[w].insert(u);
    }
  }

  /// Graph on vertices 0..n-1 labelled by the given names, edges by index.
  static SimplicialGraph from_indices(std::vector<std::string> labels,
                                      const std::vector<std::pair<Vertex, Vertex>>& edges) {
    std::vector<std::pair<std::string, std::string>> named;
    for (auto [u, w] : edges) named.emplace_back(labels.at(u), labels.at(w));
    return SimplicialGraph(std::move(labels), named);
  }

  std::size_t size() const { return labels_.size(); }
  const std::string& label(Vertex v) const { return labels_.at(v); }
  const std::vector<std::string>& labels() const { return labels_; }

  Vertex index_of(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw InputError("unknown vertex '" + label + "'");
    return it->second;
  }
  bool has_vertex(const std::string& label) const { return index_.count(label) > 0; }

  bool adjacent(Vertex u, Vertex w) const { return adjacency_[u].contains(w); }
  const VertexSet& neighbours(Vertex v) const { return adjacency_.at(v); }

  VertexSet all() const { return VertexSet::full(size()); }
  VertexSet empty_set() const { return VertexSet(size()); }
  VertexSet set_of(std::initializer_list<const char*> names) const {
    VertexSet s(size());
    for (const char* n : names) s.insert(index_of(n));
    return s;
  }

  std::size_t edge_count() const {
    std::size_t c = 0;
    for (const auto& row : adjacency_) c += row.size();
    return c / 2;
  }
  std::vector<std::pair<Vertex, Vertex>> edges() const {
    std::vector<std::pair<Vertex, Vertex>> out;
    for (Vertex u = 0; u < size(); ++u)
      for (Vertex w = u + 1; w < size(); ++w)
        if (adjacent(u, w)) out.emplace_back(u, w);
    return out;
  }

  /// Full subgraph spanned by `s`, with labels preserved and vertex order kept.
  SimplicialGraph induced(const VertexSet& s) const {
    std::vector<std::string> labels;
    for (Vertex v : s.elements()) labels.push_back(labels_[v]);
    std::vector<std::pair<std::string, std::string>> es;
    for (auto [u, w] : edges())
      if (s.contains(u) && s.contains(w)) es.emplace_back(labels_[u], labels_[w]);
    return SimplicialGraph(std::move(labels), es);
  }

  friend bool operator==(const SimplicialGraph& a, const SimplicialGraph& b) {
    return a.labels_ == b.labels_ && a.adjacency_ == b.adjacency_;
  }

 private:
  std::vector<std::string> labels_;
  std::map<std::string, Vertex> index_;
  std::vector<VertexSet> adjacency_;
};

// ---------------------------------------------------------------------------
// JSON: {"vertices": ["a","b",...], "edges": [["a","b"],...]}

inline SimplicialGraph graph_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("vertices"))
    throw InputError("graph JSON must be an object with a \"vertices\" array");
  std::vector<std::string> labels;
  for (const auto& v : j.at("vertices")) {
    if (!v.is_string()) throw InputError("vertex labels must be strings");
    labels.push_back(v.get<std::string>());
  }
  std::vector<std::pair<std::string, std::string>> edges;
  if (j.contains("edges")) {
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
        throw InputError("edges must be pairs of vertex labels");
      edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }
  }
  return SimplicialGraph(std::move(labels), edges);
}

inline nlohmann::json graph_to_json(const SimplicialGraph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (auto [u, w] : g.edges()) edges.push_back({g.label(u), g.label(w)});
  return {{"vertices", g.labels()}, {"edges", edges}};
}

inline nlohmann::json vertex_set_to_json(const SimplicialGraph& g, const VertexSet& s) {
  nlohmann::json out = nlohmann::json::array();
  for (Vertex v : s.elements()) out.push_back(g.label(v));
  return out;
}

// ---------------------------------------------------------------------------
// Links, stars, cliques.

inline void check_vertex(const SimplicialGraph& g, Vertex v) {
  if (v >= g.size()) throw InputError("vertex index " + std::to_string(v) + " out of range");
}

inline VertexSet link(const SimplicialGraph& g, Vertex v) {
  check_vertex(g, v);
  return g.neighbours(v);
}

inline VertexSet star(const SimplicialGraph& g, Vertex v) {
  VertexSet s = link(g, v);
  s.insert(v);
  return s;
}

/// {w : St(v) ⊆ St(w)}; always a clique containing v.
inline VertexSet kappa(const SimplicialGraph& g, Vertex v) {
  const VertexSet sv = star(g, v);
  VertexSet out(g.size());
  for (Vertex w = 0; w < g.size(); ++w)
    if (sv.subset_of(star(g, w))) out.insert(w);
  return out;
}

inline bool is_clique(const SimplicialGraph& g, const VertexSet& s) {
  auto es = s.elements();
  for (std::size_t i = 0; i < es.size(); ++i)
    for (std::size_t j = i + 1; j < es.size(); ++j)
      if (!g.adjacent(es[i], es[j])) return false;
  return true;
}

/// Intersection of all stars containing `s`; the empty family gives all vertices.
inline VertexSet star_closure(const SimplicialGraph& g, const VertexSet& s) {
  VertexSet cl = g.all();
  for (Vertex u = 0; u < g.size(); ++u) {
    VertexSet su = star(g, u);
    if (s.subset_of(su)) cl &= su;
  }
  return cl;
}

inline bool is_intersection_of_stars(const SimplicialGraph& g, const VertexSet& s) {
  return star_closure(g, s) == s;
}

/// Vertices adjacent to every vertex of `s` and not in `s`.
inline VertexSet orthogonal(const SimplicialGraph& g, const VertexSet& s) {
  VertexSet out = g.all() - s;
  for (Vertex v : s.elements()) out &= g.neighbours(v);
  return out;
}

// ---------------------------------------------------------------------------
// Joins.

/// Connected components of the complement graph induced on `s`, sorted.
inline std::vector<VertexSet> complement_components(const SimplicialGraph& g,
                                                    const VertexSet& s) {
  std::vector<VertexSet> comps;
  VertexSet seen(g.size());
  for (Vertex start : s.elements()) {
    if (seen.contains(start)) continue;
    VertexSet comp(g.size());
    std::queue<Vertex> q;
    q.push(start);
    seen.insert(start);
    while (!q.empty()) {
      Vertex u = q.front();
      q.pop();
      comp.insert(u);
      for (Vertex w : s.elements())
        if (w != u && !seen.contains(w) && !g.adjacent(u, w)) {
          seen.insert(w);
          q.push(w);
        }
    }
    comps.push_back(comp);
  }
  std::sort(comps.begin(), comps.end());
  return comps;
}

/// Connected components of the full subgraph induced on `s`, sorted.
inline std::vector<VertexSet> components(const SimplicialGraph& g, const VertexSet& s) {
  std::vector<VertexSet> comps;
  VertexSet seen(g.size());
  for (Vertex start : s.elements()) {
    if (seen.contains(start)) continue;
    VertexSet comp(g.size());
    std::queue<Vertex> q;
    q.push(start);
    seen.insert(start);
    while (!q.empty()) {
      Vertex u = q.front();
      q.pop();
      comp.insert(u);
      for (Vertex w : (g.neighbours(u) & s).elements())
        if (!seen.contains(w)) {
          seen.insert(w);
          q.push(w);
        }
    }
    comps.push_back(comp);
  }
  std::sort(comps.begin(), comps.end());
  return comps;
}

/// Nontrivial join: at least two vertices and disconnected complement.
inline bool is_join(const SimplicialGraph& g, const VertexSet& s) {
  return s.size() >= 2 && complement_components(g, s).size() >= 2;
}

struct JoinDecomposition {
  VertexSet clique_part;                  // singleton complement components
  std::vector<VertexSet> irreducible;     // the remaining components, sorted
};

inline JoinDecomposition join_decomposition(const SimplicialGraph& g, const VertexSet& s) {
  if (s.empty()) throw InputError("join_decomposition of the empty set");
  JoinDecomposition out{g.empty_set(), {}};
  for (auto& c : complement_components(g, s)) {
    if (c.size() == 1)
      out.clique_part |= c;
    else
      out.irreducible.push_back(c);
  }
  return out;
}

/// Calls `fn` on every subset of `s` (including the empty set and `s`).
inline void for_each_subset(const VertexSet& s, const std::function<void(const VertexSet&)>& fn) {
  auto es = s.elements();
  if (es.size() > kMaxEnumerableVertices)
    throw InputError("subset enumeration limited to " +
                     std::to_string(kMaxEnumerableVertices) + " vertices");
  const std::uint64_t count = std::uint64_t{1} << es.size();
  for (std::uint64_t m = 0; m < count; ++m) {
    VertexSet sub(s.universe());
    for (std::size_t i = 0; i < es.size(); ++i)
      if ((m >> i) & 1u) sub.insert(es[i]);
    fn(sub);
  }
}

}  // namespace twistbench
