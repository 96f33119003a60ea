#pragma once

// Free products G = Z/o_1 * ... * Z/o_r * F_s of finite cyclic groups with a
// free group, their syllable normal form, the Bass–Serre tree T of the
// splitting with a central trivial vertex (r edges to the factor vertices and
// s loops for the stable letters), and the graph Γ obtained from T by blowing
// each factor vertex up into a Cayley cycle.
//
// Γ vertices are pairs (g, type): type 0 is the central vertex g, type i+1 is
// the element g of the blown-up coset g·K_i. Edges:
//   (g,0) -- (g,i+1),   (g,i+1) -- (g·x_i, i+1),   (g,0) -- (g·u_j, 0).

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "twistbench/errors.hpp"

namespace twistbench {

struct Syllable {
  int source = 0;  // factor index < r, else r + stable index
  long exp = 0;    // factor: 1..o-1; stable: nonzero
  friend bool operator==(const Syllable&, const Syllable&) = default;
  friend auto operator<=>(const Syllable&, const Syllable&) = default;
};

struct FPWord {
  std::vector<Syllable> syl;
  bool is_identity() const { return syl.empty(); }
  friend bool operator==(const FPWord&, const FPWord&) = default;
  friend auto operator<=>(const FPWord&, const FPWord&) = default;
};

struct FreeProductSpec {
  std::vector<long> orders;                // o_i ≥ 2
  int free_rank = 0;                       // s
  std::vector<std::string> factor_names;   // generator x_i of K_i
  std::vector<std::string> stable_names;   // u_j
  std::vector<std::vector<FPWord>> gen_sets;  // S_i ⊆ K_i

  int factors() const { return static_cast<int>(orders.size()); }
  int sources() const { return factors() + free_rank; }
  bool is_factor(int src) const { return src < factors(); }
  int grushko_rank() const { return sources(); }
  long order(int src) const { return orders.at(static_cast<std::size_t>(src)); }

  void validate() const {
    if (sources() < 2) throw InputError("need at least two free factors");
    if (free_rank < 0) throw InputError("free rank must be nonnegative");
    for (long o : orders)
      if (o < 2) throw InputError("factor orders must be at least 2");
    if (factor_names.size() != orders.size() ||
        stable_names.size() != static_cast<std::size_t>(free_rank))
      throw InputError("one name per factor and stable letter");
    if (gen_sets.size() != orders.size()) throw InputError("one generating set per factor");
  }

  const std::string& name(int src) const {
    return is_factor(src) ? factor_names.at(static_cast<std::size_t>(src))
                          : stable_names.at(static_cast<std::size_t>(src - factors()));
  }
  int source_of(const std::string& n) const {
    for (int s = 0; s < sources(); ++s)
      if (name(s) == n) return s;
    throw InputError("unknown generator '" + n + "'");
  }
};

// ---------------------------------------------------------------------------
// Syllable arithmetic.

inline long reduce_exp(const FreeProductSpec& sp, int src, long e) {
  if (!sp.is_factor(src)) return e;
  long o = sp.order(src);
  return ((e % o) + o) % o;
}

/// Right-multiplies by a syllable, merging and cancelling at the junction.
inline void push_syllable(const FreeProductSpec& sp, FPWord& w, Syllable s) {
  if (s.source < 0 || s.source >= sp.sources()) throw InputError("syllable source out of range");
  s.exp = reduce_exp(sp, s.source, s.exp);
  if (s.exp == 0) return;
  if (!w.syl.empty() && w.syl.back().source == s.source) {
    long e = reduce_exp(sp, s.source, w.syl.back().exp + s.exp);
    if (e == 0)
      w.syl.pop_back();
    else
      w.syl.back().exp = e;
    return;
  }
  w.syl.push_back(s);
}

inline FPWord fp_normalize(const FreeProductSpec& sp, const std::vector<Syllable>& raw) {
  FPWord w;
  for (const auto& s : raw) push_syllable(sp, w, s);
  return w;
}

inline FPWord fp_mul(const FreeProductSpec& sp, const FPWord& a, const FPWord& b) {
  FPWord w = a;
  for (const auto& s : b.syl) push_syllable(sp, w, s);
  return w;
}

inline FPWord fp_inv(const FreeProductSpec& sp, const FPWord& a) {
  FPWord w;
  for (auto it = a.syl.rbegin(); it != a.syl.rend(); ++it)
    push_syllable(sp, w, {it->source, -it->exp});
  return w;
}

inline FPWord fp_conj(const FreeProductSpec& sp, const FPWord& c, const FPWord& w) {
  return fp_mul(sp, fp_mul(sp, c, w), fp_inv(sp, c));
}

inline FPWord fp_pow(const FreeProductSpec& sp, const FPWord& a, long n) {
  FPWord base = n < 0 ? fp_inv(sp, a) : a, out;
  for (long i = 0; i < std::abs(n); ++i) out = fp_mul(sp, out, base);
  return out;
}

inline FPWord fp_gen(const FreeProductSpec& sp, int src, long e = 1) {
  return fp_normalize(sp, {{src, e}});
}

struct FPCyclic {
  FPWord core;
  FPWord conjugator;  // w = conjugator · core · conjugator^{-1}
};

/// Peels matching first/last sources until the core alternates cyclically.
inline FPCyclic fp_cyclically_reduce(const FreeProductSpec& sp, const FPWord& w) {
  FPWord core = w, conj;
  while (core.syl.size() >= 2 && core.syl.front().source == core.syl.back().source) {
    Syllable first = core.syl.front();
    push_syllable(sp, conj, first);
    FPWord rest;
    rest.syl.assign(core.syl.begin() + 1, core.syl.end());
    push_syllable(sp, rest, first);
    core = rest;
  }
  return {core, conj};
}

inline bool fp_is_elliptic(const FreeProductSpec& sp, const FPWord& w) {
  auto c = fp_cyclically_reduce(sp, w).core;
  return c.syl.empty() || (c.syl.size() == 1 && sp.is_factor(c.syl[0].source));
}

/// Translation length on T: two edges per factor syllable and one per unit
/// of stable exponent in the cyclic core; zero for elliptic elements.
inline long fp_tree_translation_length(const FreeProductSpec& sp, const FPWord& w) {
  if (fp_is_elliptic(sp, w)) return 0;
  long len = 0;
  for (const auto& s : fp_cyclically_reduce(sp, w).core.syl)
    len += sp.is_factor(s.source) ? 2 : std::abs(s.exp);
  return len;
}

inline long cycle_distance(long k, long o) {
  k = ((k % o) + o) % o;
  return std::min(k, o - k);
}

// ---------------------------------------------------------------------------
// Γ and T geometry.

struct GVertex {
  FPWord g;
  int type = 0;  // 0 central, i+1 in the blow-up of K_i
  friend bool operator==(const GVertex&, const GVertex&) = default;
  friend auto operator<=>(const GVertex&, const GVertex&) = default;
};

/// d_Γ((1,a), (w,b)).
inline long gamma_distance_from_identity(const FreeProductSpec& sp, int a, const FPWord& w, int b) {
  if (w.syl.empty()) {
    if (a == b) return 0;
    return (a == 0 || b == 0) ? 1 : 2;
  }
  long d = 0;
  for (const auto& s : w.syl)
    d += sp.is_factor(s.source) ? 2 + cycle_distance(s.exp, sp.order(s.source)) : std::abs(s.exp);
  if (a != 0) d += (sp.is_factor(w.syl.front().source) && w.syl.front().source == a - 1) ? -1 : 1;
  if (b != 0) d += (sp.is_factor(w.syl.back().source) && w.syl.back().source == b - 1) ? -1 : 1;
  return d;
}

inline long gamma_distance(const FreeProductSpec& sp, const GVertex& p, const GVertex& q) {
  return gamma_distance_from_identity(sp, p.type, fp_mul(sp, fp_inv(sp, p.g), q.g), q.type);
}

inline std::vector<GVertex> gamma_neighbours(const FreeProductSpec& sp, const GVertex& v) {
  std::vector<GVertex> out;
  if (v.type == 0) {
    for (int i = 0; i < sp.factors(); ++i) out.push_back({v.g, i + 1});
    for (int j = 0; j < sp.free_rank; ++j)
      for (long e : {1L, -1L}) out.push_back({fp_mul(sp, v.g, fp_gen(sp, sp.factors() + j, e)), 0});
  } else {
    out.push_back({v.g, 0});
    int i = v.type - 1;
    out.push_back({fp_mul(sp, v.g, fp_gen(sp, i, 1)), v.type});
    if (sp.order(i) > 2) out.push_back({fp_mul(sp, v.g, fp_gen(sp, i, -1)), v.type});
  }
  return out;
}

inline GVertex translate(const FreeProductSpec& sp, const FPWord& h, const GVertex& v) {
  return {fp_mul(sp, h, v.g), v.type};
}

/// Breadth-first ball in Γ, as vertex → distance.
inline std::map<GVertex, long> gamma_ball(const FreeProductSpec& sp, const GVertex& center, long radius) {
  std::map<GVertex, long> dist{{center, 0}};
  std::queue<GVertex> q;
  q.push(center);
  while (!q.empty()) {
    GVertex v = q.front();
    q.pop();
    long d = dist[v];
    if (d == radius) continue;
    for (auto& n : gamma_neighbours(sp, v))
      if (dist.emplace(n, d + 1).second) q.push(n);
  }
  return dist;
}

/// T vertex: central g (type 0) or the coset g·K_i (type i+1, g canonical:
/// no trailing K_i syllable).
using TVertex = GVertex;

inline TVertex t_canonical(const FreeProductSpec& sp, TVertex v) {
  if (v.type != 0 && !v.g.syl.empty() && v.g.syl.back().source == v.type - 1) v.g.syl.pop_back();
  (void)sp;
  return v;
}

inline TVertex project(const FreeProductSpec& sp, const GVertex& v) { return t_canonical(sp, v); }

/// Vertices on the geodesic from the central vertex 1 to v, excluding 1.
inline std::vector<TVertex> t_root_path(const FreeProductSpec& sp, const TVertex& v0) {
  TVertex v = t_canonical(sp, v0);
  std::vector<TVertex> out;
  FPWord p;
  for (const auto& s : v.g.syl) {
    if (sp.is_factor(s.source)) {
      out.push_back({p, s.source + 1});
      push_syllable(sp, p, s);
      out.push_back({p, 0});
    } else {
      long step = s.exp > 0 ? 1 : -1;
      for (long k = 0; k < std::abs(s.exp); ++k) {
        push_syllable(sp, p, {s.source, step});
        out.push_back({p, 0});
      }
    }
  }
  if (v.type != 0) out.push_back(v);
  return out;
}

inline long tree_distance(const FreeProductSpec& sp, const TVertex& a, const TVertex& b) {
  auto pa = t_root_path(sp, a), pb = t_root_path(sp, b);
  std::size_t common = 0;
  while (common < pa.size() && common < pb.size() && pa[common] == pb[common]) ++common;
  return static_cast<long>(pa.size() + pb.size() - 2 * common);
}

/// Vertices of the smallest subtree containing `pts`.
inline std::set<TVertex> tree_hull(const FreeProductSpec& sp, const std::vector<TVertex>& pts) {
  std::set<TVertex> out;
  if (pts.empty()) return out;
  std::vector<std::vector<TVertex>> paths;
  for (const auto& p : pts) {
    auto path = t_root_path(sp, p);
    path.insert(path.begin(), TVertex{});
    paths.push_back(path);
  }
  std::size_t lca = paths[0].size();
  for (const auto& p : paths) {
    std::size_t c = 0;
    while (c < lca && c < p.size() && p[c] == paths[0][c]) ++c;
    lca = c;
  }
  for (const auto& p : paths)
    for (std::size_t k = lca - 1; k < p.size(); ++k) out.insert(p[k]);
  return out;
}

struct TEdge {
  TVertex a, b;
};

/// The Γ-edge over a T-edge.
inline std::pair<GVertex, GVertex> lift_edge(const FreeProductSpec& sp, const TEdge& e) {
  TVertex a = t_canonical(sp, e.a), b = t_canonical(sp, e.b);
  if (a.type != 0) std::swap(a, b);
  if (b.type == 0) return {a, b};
  return {a, GVertex{a.g, b.type}};
}

inline long gamma_edge_distance(const FreeProductSpec& sp, const TEdge& e, const TEdge& f) {
  auto [a1, a2] = lift_edge(sp, e);
  auto [b1, b2] = lift_edge(sp, f);
  return std::min({gamma_distance(sp, a1, b1), gamma_distance(sp, a1, b2), gamma_distance(sp, a2, b1),
                   gamma_distance(sp, a2, b2)});
}

/// d_Γ(x, w·x).
inline long gamma_displacement(const FreeProductSpec& sp, const FPWord& w, const GVertex& base) {
  return gamma_distance(sp, base, translate(sp, w, base));
}

/// Ordered vertices of the axis of a loxodromic element, covering 2n+1 periods.
inline std::vector<TVertex> axis_vertices(const FreeProductSpec& sp, const FPWord& w, long periods) {
  if (fp_is_elliptic(sp, w)) throw ContractError("elliptic elements have no axis");
  auto [h, c] = fp_cyclically_reduce(sp, w);
  auto step = t_root_path(sp, {h, 0});  // 1 → h, ends at central h
  std::vector<TVertex> out;
  for (long n = -periods; n < periods; ++n) {
    FPWord hn = fp_pow(sp, h, n);
    out.push_back(t_canonical(sp, translate(sp, fp_mul(sp, c, hn), {FPWord{}, 0})));
    for (std::size_t k = 0; k + 1 < step.size(); ++k)
      out.push_back(t_canonical(sp, translate(sp, fp_mul(sp, c, hn), step[k])));
  }
  out.push_back(t_canonical(sp, translate(sp, fp_mul(sp, c, fp_pow(sp, h, periods)), {FPWord{}, 0})));
  return out;
}

/// Fixed vertex of a nontrivial elliptic element.
inline TVertex fixed_vertex(const FreeProductSpec& sp, const FPWord& w) {
  auto [h, c] = fp_cyclically_reduce(sp, w);
  if (h.syl.size() != 1 || !sp.is_factor(h.syl[0].source))
    throw ContractError("not a nontrivial elliptic element");
  return t_canonical(sp, {c, h.syl[0].source + 1});
}

/// ℓ_Γ(g) = d_Γ(e, g·e) + 1 for an edge e on the axis of g.
inline long gamma_translation_length(const FreeProductSpec& sp, const FPWord& w) {
  if (fp_is_elliptic(sp, w)) return 0;
  auto ax = axis_vertices(sp, w, 1);
  TEdge e{ax[0], ax[1]};
  TEdge ge{t_canonical(sp, translate(sp, w, e.a)), t_canonical(sp, translate(sp, w, e.b))};
  return gamma_edge_distance(sp, e, ge) + 1;
}

// ---------------------------------------------------------------------------
// Displacement functionals on Γ.

/// Σ_s d(x, s·x) with x = (g, type).
inline long sum_displacement(const FreeProductSpec& sp, const std::vector<FPWord>& omega, const GVertex& x) {
  long total = 0;
  FPWord gi = fp_inv(sp, x.g);
  for (const auto& s : omega)
    total += gamma_distance_from_identity(sp, x.type, fp_mul(sp, fp_mul(sp, gi, s), x.g), x.type);
  return total;
}

inline long max_displacement(const FreeProductSpec& sp, const std::vector<FPWord>& omega, const GVertex& x) {
  long m = 0;
  FPWord gi = fp_inv(sp, x.g);
  for (const auto& s : omega)
    m = std::max(m, gamma_distance_from_identity(sp, x.type, fp_mul(sp, fp_mul(sp, gi, s), x.g), x.type));
  return m;
}

/// Steepest descent from `start` on the given objective.
template <class F>
GVertex descend(const FreeProductSpec& sp, GVertex x, F&& objective, long max_steps = 10'000) {
  long val = objective(x);
  for (long step = 0; step < max_steps; ++step) {
    GVertex best = x;
    long best_val = val;
    for (auto& n : gamma_neighbours(sp, x)) {
      long v = objective(n);
      if (v < best_val) {
        best = n;
        best_val = v;
      }
    }
    if (best_val >= val) break;
    x = best;
    val = best_val;
  }
  return x;
}

struct FunctionalValue {
  long value = 0;
  bool certified = false;
  GVertex argmin;
  GVertex center;
};

template <class F>
FunctionalValue ball_minimum(const FreeProductSpec& sp, const GVertex& center, long radius, F&& objective) {
  if (radius < 0) throw InputError("negative search radius");
  FunctionalValue out;
  out.center = center;
  bool first = true;
  long best_dist = 0;
  for (const auto& [v, d] : gamma_ball(sp, center, radius)) {
    long val = objective(v);
    if (first || val < out.value || (val == out.value && d < best_dist)) {
      out.value = val;
      out.argmin = v;
      best_dist = d;
      first = false;
    }
  }
  out.certified = best_dist < radius;
  return out;
}

/// 𝔰(Ω; Γ) by exhaustive search in the radius-R ball around `center`
/// (descent from (1,0) when no center is given).
inline FunctionalValue s_functional(const FreeProductSpec& sp, const std::vector<FPWord>& omega, long radius,
                                    std::optional<GVertex> center = {}) {
  if (omega.empty()) throw InputError("Ω must be nonempty");
  auto obj = [&](const GVertex& x) { return sum_displacement(sp, omega, x); };
  GVertex c = center ? *center : descend(sp, GVertex{FPWord{}, 0}, obj);
  return ball_minimum(sp, c, radius, obj);
}

inline FunctionalValue t_functional(const FreeProductSpec& sp, const std::vector<FPWord>& omega, long radius,
                                    std::optional<GVertex> center = {}) {
  if (omega.empty()) throw InputError("Ω must be nonempty");
  auto sum = [&](const GVertex& x) { return sum_displacement(sp, omega, x); };
  auto obj = [&](const GVertex& x) { return max_displacement(sp, omega, x); };
  GVertex c = center ? *center : descend(sp, GVertex{FPWord{}, 0}, sum);
  return ball_minimum(sp, c, radius, obj);
}

/// Cheap 𝔰 estimate used inside searches: descent only.
inline long s_descent_value(const FreeProductSpec& sp, const std::vector<FPWord>& omega) {
  auto obj = [&](const GVertex& x) { return sum_displacement(sp, omega, x); };
  return obj(descend(sp, GVertex{FPWord{}, 0}, obj));
}

// ---------------------------------------------------------------------------
// Text and JSON formats. A word is a list of tokens "x", "x^2", "-t", "t^-3".

inline FPWord fp_parse_tokens(const FreeProductSpec& sp, const std::vector<std::string>& tokens) {
  std::vector<Syllable> raw;
  for (std::string tok : tokens) {
    long sign = 1;
    if (!tok.empty() && tok[0] == '-') {
      sign = -1;
      tok = tok.substr(1);
    }
    long e = 1;
    auto caret = tok.find('^');
    if (caret != std::string::npos) {
      try {
        std::size_t used = 0;
        e = std::stol(tok.substr(caret + 1), &used);
        if (used != tok.size() - caret - 1) throw InputError("bad exponent in '" + tok + "'");
      } catch (const std::logic_error&) {
        throw InputError("bad exponent in '" + tok + "'");
      }
      tok = tok.substr(0, caret);
    }
    raw.push_back({sp.source_of(tok), sign * e});
  }
  return fp_normalize(sp, raw);
}

inline FPWord fp_from_json(const FreeProductSpec& sp, const nlohmann::json& j) {
  if (j.is_string()) return fp_parse_tokens(sp, {j.get<std::string>()});
  if (!j.is_array()) throw InputError("word must be an array of tokens");
  std::vector<std::string> toks;
  for (const auto& t : j) {
    if (!t.is_string()) throw InputError("word tokens must be strings");
    toks.push_back(t.get<std::string>());
  }
  return fp_parse_tokens(sp, toks);
}

inline nlohmann::json fp_to_json(const FreeProductSpec& sp, const FPWord& w) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : w.syl)
    out.push_back(s.exp == 1 ? sp.name(s.source) : sp.name(s.source) + "^" + std::to_string(s.exp));
  return out;
}

inline std::string fp_to_string(const FreeProductSpec& sp, const FPWord& w) {
  if (w.syl.empty()) return "1";
  std::string out;
  for (const auto& s : w.syl) {
    if (!out.empty()) out += " ";
    out += s.exp == 1 ? sp.name(s.source) : sp.name(s.source) + "^" + std::to_string(s.exp);
  }
  return out;
}

inline std::vector<std::string> default_names(const std::vector<std::string>& pool, const std::string& stem,
                                              int count) {
  std::vector<std::string> out;
  for (int i = 0; i < count; ++i)
    out.push_back(static_cast<std::size_t>(i) < pool.size() ? pool[static_cast<std::size_t>(i)]
                                                            : stem + std::to_string(i + 1));
  return out;
}

/// Spec with default names (x, y, z, w for factors; t, u, v for stable
/// letters) and S_i = {x_i}.
inline FreeProductSpec make_spec(std::vector<long> orders, int free_rank) {
  FreeProductSpec sp;
  sp.orders = std::move(orders);
  sp.free_rank = free_rank;
  sp.factor_names = default_names({"x", "y", "z", "w"}, "x", sp.factors());
  sp.stable_names = default_names({"t", "u", "v"}, "t", free_rank);
  for (int i = 0; i < sp.factors(); ++i) sp.gen_sets.push_back({fp_gen(sp, i)});
  sp.validate();
  return sp;
}

/// {"orders":[2,3], "free_rank":1, "gen_sets":[["x"],["y"]]}; optional
/// "factor_names" and "stable_names".
inline FreeProductSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("orders")) throw InputError("spec needs an \"orders\" array");
  FreeProductSpec sp;
  try {
    sp.orders = j.at("orders").get<std::vector<long>>();
    sp.free_rank = j.value("free_rank", 0);
    sp.factor_names = j.contains("factor_names") ? j["factor_names"].get<std::vector<std::string>>()
                                                 : default_names({"x", "y", "z", "w"}, "x", sp.factors());
    sp.stable_names = j.contains("stable_names") ? j["stable_names"].get<std::vector<std::string>>()
                                                 : default_names({"t", "u", "v"}, "t", sp.free_rank);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed spec: ") + e.what());
  }
  for (long o : sp.orders)
    if (o < 2) throw InputError("factor orders must be at least 2");
  if (j.contains("gen_sets")) {
    const auto& gs = j["gen_sets"];
    if (!gs.is_array() || gs.size() != sp.orders.size()) throw InputError("one generating set per factor");
    for (std::size_t i = 0; i < gs.size(); ++i) {
      std::vector<FPWord> set;
      for (const auto& w : gs[i]) {
        FPWord fw = fp_from_json(sp, w);
        for (const auto& s : fw.syl)
          if (s.source != static_cast<int>(i)) throw InputError("S_i must lie in its factor");
        set.push_back(fw);
      }
      sp.gen_sets.push_back(set);
    }
  } else {
    for (int i = 0; i < sp.factors(); ++i) sp.gen_sets.push_back({fp_gen(sp, i)});
  }
  sp.validate();
  return sp;
}

}  // namespace twistbench
