#pragma once

// Product combinatorics of parabolic subgroups A_Δ ≤ A_Γ, all represented by
// their vertex sets: joins, extended factors, children, the standard virtual
// product closure, cofactors, salient abelians and the hierarchy fixpoint.

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "twistbench/errors.hpp"
#include "twistbench/graph_core.hpp"
#include "twistbench/raag_words.hpp"

namespace twistbench {

inline void require_nonempty(const VertexSet& d) {
  if (d.empty()) throw InputError("vertex set must be nonempty");
}

inline bool is_virtual_product(const SimplicialGraph& g, const VertexSet& d) {
  require_nonempty(d);
  return is_join(g, d);
}

/// Inclusion-maximal subsets of Δ spanning a nontrivial join, sorted.
inline std::vector<VertexSet> singular_subgraphs(const SimplicialGraph& g, const VertexSet& d) {
  require_nonempty(d);
  if (is_join(g, d)) return {d};
  std::vector<VertexSet> joins;
  for_each_subset(d, [&](const VertexSet& s) {
    if (is_join(g, s)) joins.push_back(s);
  });
  // Larger sets first so a single pass can discard anything they contain.
  std::sort(joins.begin(), joins.end(),
            [](const VertexSet& a, const VertexSet& b) { return a.size() > b.size(); });
  std::vector<VertexSet> maximal;
  for (const auto& s : joins) {
    bool dominated = std::any_of(maximal.begin(), maximal.end(),
                                 [&](const VertexSet& m) { return s.subset_of(m); });
    if (!dominated) maximal.push_back(s);
  }
  std::sort(maximal.begin(), maximal.end());
  return maximal;
}

inline std::vector<VertexSet> extended_factors(const SimplicialGraph& g, const VertexSet& d) {
  auto jd = join_decomposition(g, d);
  if (jd.irreducible.empty()) return {d};
  std::vector<VertexSet> out;
  for (const auto& f : jd.irreducible) out.push_back(f | jd.clique_part);
  return out;
}

inline std::vector<VertexSet> children(const SimplicialGraph& g, const VertexSet& d) {
  auto jd = join_decomposition(g, d);
  std::set<VertexSet> out;
  if (jd.clique_part.size() >= 2 && !(jd.clique_part == d)) out.insert(jd.clique_part);
  for (std::size_t i = 0; i < jd.irreducible.size(); ++i) {
    VertexSet others = jd.clique_part;
    for (std::size_t j = 0; j < jd.irreducible.size(); ++j)
      if (j != i) others |= jd.irreducible[j];
    for (const auto& s : singular_subgraphs(g, jd.irreducible[i])) out.insert(others | s);
  }
  return {out.begin(), out.end()};
}

inline std::vector<VertexSet> svp_closure(const SimplicialGraph& g) {
  if (g.size() == 0) return {};
  std::set<VertexSet> family;
  std::vector<VertexSet> frontier = singular_subgraphs(g, g.all());
  while (!frontier.empty()) {
    VertexSet d = frontier.back();
    frontier.pop_back();
    if (!family.insert(d).second) continue;
    for (auto& c : children(g, d))
      if (!family.count(c)) frontier.push_back(c);
  }
  return {family.begin(), family.end()};
}

/// Root-closures of all-but-one extended factor; the centre for a single
/// non-abelian factor; nothing for abelian Δ.
inline std::vector<VertexSet> cofactors(const SimplicialGraph& g, const VertexSet& d) {
  auto jd = join_decomposition(g, d);
  if (jd.irreducible.empty()) return {};
  if (jd.irreducible.size() == 1) {
    if (jd.clique_part.empty()) return {};
    return {jd.clique_part};
  }
  std::vector<VertexSet> out;
  for (const auto& f : jd.irreducible) out.push_back(d - f);
  std::sort(out.begin(), out.end());
  return out;
}

/// A_Δ is self-normalising iff nothing outside Δ commutes with all of Δ.
inline bool self_normalising(const SimplicialGraph& g, const VertexSet& d) {
  return orthogonal(g, d).empty();
}

inline std::vector<VertexSet> salient_abelians(const SimplicialGraph& g) {
  std::set<VertexSet> out;
  for (const auto& d : svp_closure(g)) {
    VertexSet k = join_decomposition(g, d).clique_part;
    if (!k.empty() && self_normalising(g, d)) out.insert(k);
  }
  return {out.begin(), out.end()};
}

// ---------------------------------------------------------------------------
// Extra-salience, decided against parabolic centralisers A_Y with Y an
// intersection of stars, plus a bounded search over element centralisers.

struct ExtraSalience {
  bool certified_parabolic = false;  // no parabolic centraliser has cyclic quotient
  Vertex dropped_vertex = 0;         // on failure: the generator left out
  Vertex star_vertex = 0;            // on failure: St(u) containing the rest
  bool bounded_search_agrees = true;
  NormalWord bounded_witness;        // element whose centraliser has cyclic quotient
  std::size_t bounded_length = 0;
};

/// Rank of a set of integer vectors (fraction-free Gaussian elimination).
inline std::size_t integer_rank(std::vector<std::vector<long long>> rows) {
  std::size_t rank = 0;
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
    std::size_t piv = rank;
    while (piv < rows.size() && rows[piv][c] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[rank]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == rank || rows[r][c] == 0) continue;
      long long a = rows[rank][c], b = rows[r][c];
      long long gcd = std::gcd(a, b);
      for (std::size_t k = 0; k < cols; ++k) rows[r][k] = rows[r][k] * (a / gcd) - rows[rank][k] * (b / gcd);
      long long cg = 0;
      for (long long x : rows[r]) cg = std::gcd(cg, x);
      if (cg > 1)
        for (long long& x : rows[r]) x /= cg;
    }
    ++rank;
  }
  return rank;
}

/// Visits every element of length ≤ radius once, as a lex normal form.
inline void for_each_in_ball(const SimplicialGraph& g, std::size_t radius,
                             const std::function<void(const Letters&)>& fn) {
  Letters x;
  std::function<void()> rec = [&] {
    fn(x);
    if (x.size() == radius) return;
    for (Vertex v = 0; v < g.size(); ++v)
      for (int sign : {1, -1}) {
        Letter y{v, sign};
        if (!words::extends_normal_form(g, x, y)) continue;
        x.push_back(y);
        rec();
        x.pop_back();
      }
  };
  rec();
}

inline ExtraSalience extra_salience(const GraphPtr& gp, const VertexSet& k,
                                    std::size_t search_length = 4) {
  const SimplicialGraph& g = *gp;
  require_nonempty(k);
  if (!is_clique(g, k)) throw InputError("extra-salience needs a clique");
  ExtraSalience out;
  out.certified_parabolic = true;
  for (Vertex x : k.elements()) {
    VertexSet rest = k;
    rest.erase(x);
    for (Vertex u = 0; u < g.size() && out.certified_parabolic; ++u) {
      VertexSet su = star(g, u);
      if (rest.subset_of(su) && !su.contains(x)) {
        out.certified_parabolic = false;
        out.dropped_vertex = x;
        out.star_vertex = u;
      }
    }
    if (!out.certified_parabolic) break;
  }

  // Exponent vectors in {-1,0,1}^κ, tested against cyclically reduced elements.
  const auto kv = k.elements();
  std::vector<std::vector<long long>> vectors;
  std::vector<NormalWord> elems;
  std::vector<long long> e(kv.size(), -1);
  for (;;) {
    if (std::any_of(e.begin(), e.end(), [](long long x) { return x != 0; })) {
      Letters raw;
      for (std::size_t i = 0; i < kv.size(); ++i)
        for (long long t = 0; t < std::abs(e[i]); ++t) raw.push_back({kv[i], e[i] > 0 ? 1 : -1});
      vectors.push_back(e);
      elems.emplace_back(gp, raw);
    }
    std::size_t i = 0;
    while (i < e.size() && e[i] == 1) e[i++] = -1;
    if (i == e.size()) break;
    ++e[i];
  }
  bool found = false;
  for_each_in_ball(g, search_length, [&](const Letters& w) {
    if (found || w.empty()) return;
    NormalWord gw(gp, w);
    if (cyclically_reduce(gw).core.length() != gw.length()) return;
    std::vector<std::vector<long long>> inside;
    for (std::size_t i = 0; i < elems.size(); ++i)
      if (commutator(elems[i], gw).is_identity()) inside.push_back(vectors[i]);
    if (integer_rank(inside) + 1 == kv.size()) {
      found = true;
      out.bounded_witness = gw;
    }
  });
  out.bounded_length = search_length;
  // A bounded hit is itself a centraliser with cyclic quotient.
  out.bounded_search_agrees = !(found && out.certified_parabolic);
  return out;
}

// ---------------------------------------------------------------------------
// Hierarchy fixpoint under centres, extended factors and children.

struct HierarchyEntry {
  VertexSet members;
  bool is_svp = false;
  bool is_salient = false;
  bool is_extra_salient_certified_parabolic = false;
  std::vector<VertexSet> child_of;
};

struct HierarchyReport {
  std::vector<HierarchyEntry> entries;  // sorted by vertex set

  std::vector<VertexSet> sets() const {
    std::vector<VertexSet> out;
    for (const auto& e : entries) out.push_back(e.members);
    return out;
  }
  bool contains(const VertexSet& s) const {
    return std::any_of(entries.begin(), entries.end(),
                       [&](const HierarchyEntry& e) { return e.members == s; });
  }
};

/// One application of the generation rules to a member.
inline std::vector<VertexSet> hierarchy_successors(const SimplicialGraph& g, const VertexSet& d) {
  std::vector<VertexSet> out;
  auto jd = join_decomposition(g, d);
  if (!jd.clique_part.empty()) out.push_back(jd.clique_part);
  for (auto& f : extended_factors(g, d)) out.push_back(f);
  if (jd.irreducible.size() == 1)
    for (auto& c : children(g, d)) out.push_back(c);
  return out;
}

inline HierarchyReport hierarchy_fixpoint(const GraphPtr& gp) {
  const SimplicialGraph& g = *gp;
  HierarchyReport rep;
  if (g.size() == 0) return rep;
  std::map<VertexSet, HierarchyEntry> fam;
  std::vector<VertexSet> frontier{g.all()};
  fam[g.all()].members = g.all();
  while (!frontier.empty()) {
    VertexSet d = frontier.back();
    frontier.pop_back();
    auto jd = join_decomposition(g, d);
    std::vector<VertexSet> kids;
    if (jd.irreducible.size() == 1) kids = children(g, d);
    for (auto& s : hierarchy_successors(g, d)) {
      auto [it, fresh] = fam.try_emplace(s);
      if (fresh) {
        it->second.members = s;
        frontier.push_back(s);
      }
      if (std::find(kids.begin(), kids.end(), s) != kids.end() &&
          std::find(it->second.child_of.begin(), it->second.child_of.end(), d) ==
              it->second.child_of.end())
        it->second.child_of.push_back(d);
    }
  }
  auto svp = svp_closure(g);
  auto sal = salient_abelians(g);
  for (auto& [s, e] : fam) {
    e.is_svp = std::binary_search(svp.begin(), svp.end(), s);
    e.is_salient = std::binary_search(sal.begin(), sal.end(), s);
    if (e.is_salient) e.is_extra_salient_certified_parabolic = extra_salience(gp, s, 0).certified_parabolic;
    std::sort(e.child_of.begin(), e.child_of.end());
    rep.entries.push_back(e);
  }
  return rep;
}

inline nlohmann::json hierarchy_to_json(const SimplicialGraph& g, const HierarchyReport& r) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : r.entries) {
    nlohmann::json parents = nlohmann::json::array();
    for (const auto& p : e.child_of) parents.push_back(vertex_set_to_json(g, p));
    arr.push_back({{"vertices", vertex_set_to_json(g, e.members)},
                   {"is_svp", e.is_svp},
                   {"is_salient", e.is_salient},
                   {"is_extra_salient_certified_parabolic", e.is_extra_salient_certified_parabolic},
                   {"is_child_of", parents}});
  }
  return arr;
}

}  // namespace twistbench
