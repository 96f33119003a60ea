#pragma once

// Factor-respecting automorphisms of a free product of cyclic groups,
// Grushko-triple bookkeeping, the spanning-tree complexity σ_T on the
// Bass–Serre tree, and a bounded-search shortening driver.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "twistbench/errors.hpp"
#include "twistbench/free_product.hpp"

namespace twistbench {

// ---------------------------------------------------------------------------
// Elementary generators.

struct FRGen {
  enum class Kind { Conjugate, LeftMultiply, RightMultiply, Invert };
  Kind kind = Kind::Conjugate;
  int index = 0;  // factor index for Conjugate, stable index otherwise
  FPWord x;       // single syllable; empty for Invert
  friend bool operator==(const FRGen&, const FRGen&) = default;
};

inline std::string describe(const FreeProductSpec& sp, const FRGen& g) {
  switch (g.kind) {
    case FRGen::Kind::Conjugate:
      return "conj(" + sp.name(g.index) + ";" + fp_to_string(sp, g.x) + ")";
    case FRGen::Kind::LeftMultiply:
      return "left(" + sp.name(sp.factors() + g.index) + ";" + fp_to_string(sp, g.x) + ")";
    case FRGen::Kind::RightMultiply:
      return "right(" + sp.name(sp.factors() + g.index) + ";" + fp_to_string(sp, g.x) + ")";
    case FRGen::Kind::Invert:
      return "invert(" + sp.name(sp.factors() + g.index) + ")";
  }
  return "?";
}

inline FRGen inverse_gen(const FreeProductSpec& sp, const FRGen& g) {
  FRGen out = g;
  if (g.kind != FRGen::Kind::Invert) out.x = fp_inv(sp, g.x);
  return out;
}

/// Image of the standard generator of `src` under one elementary generator.
inline FPWord gen_image(const FreeProductSpec& sp, const FRGen& g, int src) {
  FPWord base = fp_gen(sp, src);
  switch (g.kind) {
    case FRGen::Kind::Conjugate:
      return src == g.index ? fp_conj(sp, g.x, base) : base;
    case FRGen::Kind::LeftMultiply:
      return src == sp.factors() + g.index ? fp_mul(sp, g.x, base) : base;
    case FRGen::Kind::RightMultiply:
      return src == sp.factors() + g.index ? fp_mul(sp, base, g.x) : base;
    case FRGen::Kind::Invert:
      return src == sp.factors() + g.index ? fp_inv(sp, base) : base;
  }
  return base;
}

/// Substitutes images[src] for each standard generator.
inline FPWord substitute(const FreeProductSpec& sp, const std::vector<FPWord>& images, const FPWord& w) {
  FPWord out;
  for (const auto& s : w.syl) out = fp_mul(sp, out, fp_pow(sp, images[static_cast<std::size_t>(s.source)], s.exp));
  return out;
}

inline FPWord apply_gen(const FreeProductSpec& sp, const FRGen& g, const FPWord& w) {
  std::vector<FPWord> images;
  for (int s = 0; s < sp.sources(); ++s) images.push_back(gen_image(sp, g, s));
  return substitute(sp, images, w);
}

/// The alphabet: nontrivial powers of each factor generator and u_j^{±1}.
inline std::vector<FPWord> fr_alphabet(const FreeProductSpec& sp) {
  std::vector<FPWord> out;
  for (int i = 0; i < sp.factors(); ++i)
    for (long e = 1; e < sp.order(i); ++e) out.push_back(fp_gen(sp, i, e));
  for (int j = 0; j < sp.free_rank; ++j)
    for (long e : {1L, -1L}) out.push_back(fp_gen(sp, sp.factors() + j, e));
  return out;
}

struct FRGenerators {
  std::vector<FRGen> fr0;        // partial conjugations and transvections
  std::vector<FRGen> inversions;  // in FR but not FR⁰
};

/// Conjugations of K_i by letters outside K_i (conjugating by its own
/// elements is trivial on an abelian factor); left/right multiplication of
/// u_j by letters other than u_j^{±1}.
inline FRGenerators fr_generators(const FreeProductSpec& sp) {
  FRGenerators out;
  auto alphabet = fr_alphabet(sp);
  for (int i = 0; i < sp.factors(); ++i)
    for (const auto& x : alphabet)
      if (x.syl[0].source != i) out.fr0.push_back({FRGen::Kind::Conjugate, i, x});
  for (int j = 0; j < sp.free_rank; ++j) {
    for (const auto& x : alphabet)
      if (x.syl[0].source != sp.factors() + j) out.fr0.push_back({FRGen::Kind::LeftMultiply, j, x});
    for (const auto& x : alphabet)
      if (x.syl[0].source != sp.factors() + j) out.fr0.push_back({FRGen::Kind::RightMultiply, j, x});
  }
  for (int j = 0; j < sp.free_rank; ++j) out.inversions.push_back({FRGen::Kind::Invert, j, {}});
  return out;
}

// ---------------------------------------------------------------------------
// Automorphisms as composites of elementary generators.

/// w = c · x_i · c^{-1} solved for c (shortest), if possible.
inline std::optional<FPWord> factor_conjugator(const FreeProductSpec& sp, const FPWord& w, int i) {
  auto [core, c] = fp_cyclically_reduce(sp, w);
  if (core.syl.size() == 1 && core.syl[0] == Syllable{i, 1}) return c;
  return std::nullopt;
}

struct FRAut {
  std::vector<FPWord> images;    // per source
  std::vector<FPWord> conj;      // per factor: images[i] = conj[i] x_i conj[i]^{-1}
  std::vector<FRGen> word;       // φ = word[0] ∘ word[1] ∘ ...

  static FRAut identity(const FreeProductSpec& sp) {
    FRAut a;
    for (int s = 0; s < sp.sources(); ++s) a.images.push_back(fp_gen(sp, s));
    a.conj.assign(static_cast<std::size_t>(sp.factors()), FPWord{});
    return a;
  }

  FPWord apply(const FreeProductSpec& sp, const FPWord& w) const { return substitute(sp, images, w); }

  std::vector<FPWord> apply(const FreeProductSpec& sp, const std::vector<FPWord>& ws) const {
    std::vector<FPWord> out;
    for (const auto& w : ws) out.push_back(apply(sp, w));
    return out;
  }

  /// g ∘ this.
  FRAut then(const FreeProductSpec& sp, const FRGen& g) const {
    FRAut out;
    for (const auto& im : images) out.images.push_back(apply_gen(sp, g, im));
    for (int i = 0; i < sp.factors(); ++i) {
      FPWord c = apply_gen(sp, g, conj[static_cast<std::size_t>(i)]);
      if (g.kind == FRGen::Kind::Conjugate && g.index == i) c = fp_mul(sp, c, g.x);
      out.conj.push_back(c);
    }
    out.word.push_back(g);
    out.word.insert(out.word.end(), word.begin(), word.end());
    return out;
  }

  FRAut inverse(const FreeProductSpec& sp) const {
    FRAut out = identity(sp);
    for (const auto& g : word) out = out.then(sp, inverse_gen(sp, g));
    return out;
  }

  bool in_fr0() const {
    return std::none_of(word.begin(), word.end(), [](const FRGen& g) { return g.kind == FRGen::Kind::Invert; });
  }

  bool is_identity(const FreeProductSpec& sp) const { return images == identity(sp).images; }

  /// Recorded conjugators match, the conjugator solver agrees, and the
  /// reversed word inverts.
  bool verify(const FreeProductSpec& sp) const {
    for (int i = 0; i < sp.factors(); ++i) {
      const auto& im = images[static_cast<std::size_t>(i)];
      if (fp_conj(sp, conj[static_cast<std::size_t>(i)], fp_gen(sp, i)) != im) return false;
      if (!factor_conjugator(sp, im, i)) return false;
    }
    FRAut inv = inverse(sp);
    for (int s = 0; s < sp.sources(); ++s)
      if (inv.apply(sp, images[static_cast<std::size_t>(s)]) != fp_gen(sp, s)) return false;
    return true;
  }
};

inline FRAut fr_from_word(const FreeProductSpec& sp, const std::vector<FRGen>& word) {
  FRAut out = FRAut::identity(sp);
  for (auto it = word.rbegin(); it != word.rend(); ++it) out = out.then(sp, *it);
  return out;
}

inline nlohmann::json fr_to_json(const FreeProductSpec& sp, const FRAut& a) {
  nlohmann::json images = nlohmann::json::object(), word = nlohmann::json::array();
  for (int s = 0; s < sp.sources(); ++s) images[sp.name(s)] = fp_to_json(sp, a.images[static_cast<std::size_t>(s)]);
  for (const auto& g : a.word) word.push_back(describe(sp, g));
  return {{"images", images}, {"generator_word", word}, {"in_fr0", a.in_fr0()}};
}

/// Uniform random composite of `depth` generators.
inline FRAut random_fr_aut(const FreeProductSpec& sp, int depth, std::mt19937_64& rng, bool with_inversions) {
  auto gens = fr_generators(sp);
  std::vector<FRGen> pool = gens.fr0;
  if (with_inversions) pool.insert(pool.end(), gens.inversions.begin(), gens.inversions.end());
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::vector<FRGen> word;
  for (int k = 0; k < depth; ++k) word.push_back(pool[pick(rng)]);
  return fr_from_word(sp, word);
}

/// S = S_1 ∪ ... ∪ S_r ∪ {u_1, ..., u_s}.
inline std::vector<FPWord> standard_set(const FreeProductSpec& sp) {
  std::vector<FPWord> out;
  for (const auto& set : sp.gen_sets) out.insert(out.end(), set.begin(), set.end());
  for (int j = 0; j < sp.free_rank; ++j) out.push_back(fp_gen(sp, sp.factors() + j));
  return out;
}

// ---------------------------------------------------------------------------
// Grushko triples.

struct GrushkoTriple {
  std::vector<std::vector<FPWord>> descriptors;
  std::vector<bool> in_c;

  std::pair<std::size_t, std::size_t> kappa() const {
    return {descriptors.size(), static_cast<std::size_t>(std::count(in_c.begin(), in_c.end(), true))};
  }

  void validate(const FreeProductSpec& sp) const {
    if (descriptors.size() != in_c.size()) throw InputError("partition must cover every descriptor");
    for (std::size_t i = 0; i < descriptors.size(); ++i) {
      if (descriptors[i].empty()) throw InputError("empty descriptor");
      if (in_c[i] && (descriptors[i].size() != 1 || fp_is_elliptic(sp, descriptors[i][0])))
        throw InputError("C-indexed descriptors are single elements of infinite order");
    }
  }
};

/// Factors in 𝒟 with their generating sets, stable letters in 𝒞.
inline GrushkoTriple defining_triple(const FreeProductSpec& sp) {
  GrushkoTriple t;
  for (const auto& set : sp.gen_sets) {
    t.descriptors.push_back(set);
    t.in_c.push_back(false);
  }
  for (int j = 0; j < sp.free_rank; ++j) {
    t.descriptors.push_back({fp_gen(sp, sp.factors() + j)});
    t.in_c.push_back(true);
  }
  return t;
}

struct GrushkoMove {
  enum class Kind { MakeD, Merge };
  Kind kind = Kind::MakeD;
  std::size_t i = 0, j = 0;
};

inline GrushkoTriple grushko_move(const GrushkoTriple& t, const GrushkoMove& mv) {
  GrushkoTriple out = t;
  std::size_t n = t.descriptors.size();
  if (mv.kind == GrushkoMove::Kind::MakeD) {
    if (mv.i >= n || !t.in_c[mv.i]) throw InputError("first move needs a C-index");
    out.in_c[mv.i] = false;
    return out;
  }
  if (mv.i >= n || mv.j >= n || mv.i == mv.j || t.in_c[mv.i] || t.in_c[mv.j])
    throw InputError("merge needs two distinct D-indices");
  std::size_t lo = std::min(mv.i, mv.j), hi = std::max(mv.i, mv.j);
  out.descriptors[lo].insert(out.descriptors[lo].end(), t.descriptors[hi].begin(), t.descriptors[hi].end());
  out.descriptors.erase(out.descriptors.begin() + static_cast<std::ptrdiff_t>(hi));
  out.in_c.erase(out.in_c.begin() + static_cast<std::ptrdiff_t>(hi));
  return out;
}

inline GrushkoTriple conjugate_triple(const FreeProductSpec& sp, const GrushkoTriple& t, const FPWord& g) {
  GrushkoTriple out = t;
  for (auto& d : out.descriptors)
    for (auto& w : d) w = fp_conj(sp, g, w);
  return out;
}

// ---------------------------------------------------------------------------
// Minimal sets in a window of T.

inline bool in_window(const FreeProductSpec& sp, const TVertex& center, long radius, const TVertex& v) {
  return tree_distance(sp, center, v) <= radius;
}

/// Min set of one element intersected with the window, in axis order.
inline std::vector<TVertex> min_set_in_window(const FreeProductSpec& sp, const FPWord& w, const TVertex& center,
                                              long radius) {
  if (w.is_identity()) throw InputError("identity has no minimal set in this sense");
  if (fp_is_elliptic(sp, w)) {
    TVertex v = fixed_vertex(sp, w);
    if (in_window(sp, center, radius, v)) return {v};
    return {};
  }
  long len = fp_tree_translation_length(sp, w);
  auto c = fp_cyclically_reduce(sp, w).conjugator;
  long reach = radius + tree_distance(sp, center, {c, 0}) + 2;
  std::vector<TVertex> out;
  for (const auto& v : axis_vertices(sp, w, reach / len + 1))
    if (in_window(sp, center, radius, v)) out.push_back(v);
  return out;
}

/// Window part of the min set of ⟨gens⟩, approximated by the hull of the
/// generators' min sets (a subtree of the true one).
inline std::vector<TVertex> descriptor_set_in_window(const FreeProductSpec& sp, const std::vector<FPWord>& gens,
                                                     const TVertex& center, long radius) {
  std::vector<TVertex> pts;
  std::size_t nontrivial = 0;
  for (const auto& g : gens) {
    if (g.is_identity()) continue;
    ++nontrivial;
    auto m = min_set_in_window(sp, g, center, radius);
    pts.insert(pts.end(), m.begin(), m.end());
  }
  if (nontrivial <= 1) return pts;
  auto hull = tree_hull(sp, pts);
  return {hull.begin(), hull.end()};
}

struct SigmaResult {
  long value = -1;  // -1 when some minimal set misses the ball
  bool certified = false;
  std::string diagnostic;
};

/// σ_T: fewest edges of a subtree of the radius-R ball that meets every
/// descriptor's minimal set and contains an arc of length ≥ ℓ_T(t) − 1 of
/// the axis of each C-indexed t.
inline SigmaResult sigma_T(const FreeProductSpec& sp, const GrushkoTriple& t, long radius,
                           TVertex center = {}, std::size_t combination_cap = 2'000'000) {
  if (radius < 0) throw InputError("negative radius");
  t.validate(sp);
  // Each descriptor contributes a list of options; an option is a set of
  // points whose hull must lie in the tree.
  std::vector<std::vector<std::vector<TVertex>>> options;
  for (std::size_t i = 0; i < t.descriptors.size(); ++i) {
    std::vector<std::vector<TVertex>> opts;
    if (t.in_c[i]) {
      const auto& g = t.descriptors[i][0];
      long len = fp_tree_translation_length(sp, g);
      auto axis = min_set_in_window(sp, g, center, radius);
      long arc = std::max(0L, len - 1);
      for (std::size_t k = 0; k + static_cast<std::size_t>(arc) < axis.size(); ++k)
        opts.push_back({axis[k], axis[k + static_cast<std::size_t>(arc)]});
    } else {
      for (const auto& v : descriptor_set_in_window(sp, t.descriptors[i], center, radius)) opts.push_back({v});
    }
    if (opts.empty()) return {-1, false, "minimal set of descriptor " + std::to_string(i) + " misses the ball"};
    options.push_back(std::move(opts));
  }
  std::size_t combos = 1;
  for (const auto& o : options) {
    if (combos > combination_cap / o.size()) return {-1, false, "too many combinations"};
    combos *= o.size();
  }
  SigmaResult best;
  std::vector<std::size_t> pick(options.size(), 0);
  for (std::size_t n = 0; n < combos; ++n) {
    std::vector<TVertex> pts;
    for (std::size_t i = 0; i < options.size(); ++i)
      pts.insert(pts.end(), options[i][pick[i]].begin(), options[i][pick[i]].end());
    auto hull = tree_hull(sp, pts);
    long edges = static_cast<long>(hull.size()) - 1;
    bool interior = std::all_of(hull.begin(), hull.end(),
                                [&](const TVertex& v) { return tree_distance(sp, center, v) < radius; });
    if (best.value < 0 || edges < best.value) {
      best.value = edges;
      best.certified = interior;
    } else if (edges == best.value && interior) {
      best.certified = true;
    }
    for (std::size_t i = 0; i < pick.size(); ++i) {
      if (++pick[i] < options[i].size()) break;
      pick[i] = 0;
    }
  }
  if (!best.certified) best.diagnostic = "every optimal tree reaches the ball boundary";
  return best;
}

// ---------------------------------------------------------------------------
// Overlap and boring-arc predicates.

inline long window_radius_for(const FreeProductSpec& sp, const std::vector<FPWord>& words) {
  long m = 0;
  for (const auto& w : words) {
    long len = 0;
    for (const auto& s : w.syl) len += sp.is_factor(s.source) ? 2 : std::abs(s.exp);
    m = std::max(m, len);
  }
  return 2 * m + 4;
}

/// The two descriptors' minimal sets share an edge, or a vertex with a
/// nontrivial stabiliser in either of them.
inline bool descriptors_overlap(const FreeProductSpec& sp, const std::vector<FPWord>& a,
                                const std::vector<FPWord>& b) {
  std::vector<FPWord> all = a;
  all.insert(all.end(), b.begin(), b.end());
  long radius = window_radius_for(sp, all);
  TVertex center{};
  auto ma = descriptor_set_in_window(sp, a, center, radius);
  auto mb = descriptor_set_in_window(sp, b, center, radius);
  std::set<TVertex> sb(mb.begin(), mb.end());
  std::vector<TVertex> common;
  for (const auto& v : ma)
    if (sb.count(v)) common.push_back(v);
  for (std::size_t p = 0; p < common.size(); ++p)
    for (std::size_t q = p + 1; q < common.size(); ++q)
      if (tree_distance(sp, common[p], common[q]) == 1) return true;
  for (const auto& v : common)
    for (const auto& g : all)
      if (!g.is_identity() && fp_is_elliptic(sp, g) && fixed_vertex(sp, g) == v) return true;
  return false;
}

struct BoringArcCheck {
  long arcs = 0;
  long worst_distance = 0;
  long threshold = 0;
  bool holds = true;
};

/// Arcs of the axis of a loxodromic t whose interior vertices have trivial
/// stabilisers and lie in distinct ⟨t⟩-orbits; checks d_Γ(first edge, last
/// edge) < 6·D.
inline BoringArcCheck boring_arc_check(const FreeProductSpec& sp, const FPWord& t, long D) {
  BoringArcCheck out;
  out.threshold = 6 * D;
  if (fp_is_elliptic(sp, t)) return out;
  long len = fp_tree_translation_length(sp, t);
  auto axis = axis_vertices(sp, t, 2);
  std::size_t start = axis.size() / 2 - static_cast<std::size_t>(len);
  for (std::size_t a = start; a < start + static_cast<std::size_t>(len); ++a)
    for (std::size_t b = a + 1; b < axis.size() && static_cast<long>(b - a) <= len + 1; ++b) {
      bool trivial = true;
      for (std::size_t k = a + 1; k < b; ++k) trivial = trivial && axis[k].type == 0;
      if (!trivial) break;
      TEdge e{axis[a], axis[a + 1]}, f{axis[b - 1], axis[b]};
      long d = gamma_edge_distance(sp, e, f);
      ++out.arcs;
      out.worst_distance = std::max(out.worst_distance, d);
      if (d >= out.threshold) out.holds = false;
    }
  return out;
}

// ---------------------------------------------------------------------------
// Bound constant.

/// (24·Gr³)^{m+1} · (2 + 2|S|)^{k+m+1}, exact; throws on overflow.
inline std::int64_t bound_constant(long k, long m, long set_size, long gr) {
  if (k < 0 || m < 0 || k + m < 1) throw InputError("need k, m ≥ 0 with k + m ≥ 1");
  if (set_size < 0 || gr < 1) throw InputError("need |S| ≥ 0 and Gr ≥ 1");
  auto mul = [](std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw ContractError("bound constant overflows 64 bits");
    return r;
  };
  std::int64_t base1 = mul(24, mul(gr, mul(gr, gr))), base2 = 2 + 2 * static_cast<std::int64_t>(set_size);
  std::int64_t out = 1;
  for (long e = 0; e < m + 1; ++e) out = mul(out, base1);
  for (long e = 0; e < k + m + 1; ++e) out = mul(out, base2);
  return out;
}

// ---------------------------------------------------------------------------
// Shortening driver.

struct ShortenBudget {
  int word_length = 6;   // L
  long radius = 3;       // final certification ball
  int beam_width = 6;
  int max_rounds = 40;
};

struct BranchEvent {
  std::string branch;  // "make-D", "merge", "terminal"
  std::vector<std::size_t> indices;
  long s_before = 0, s_after = 0;
  long target = 0;
  bool target_met = false;
  std::string note;
};

struct ShortenReport {
  long D = 0;
  std::int64_t K = 0;
  std::int64_t bound = 0;  // K · max(1, D)
  long s_initial = 0;
  long s_final = 0;
  bool certified = false;
  bool within_bound = false;
  bool budget_exhausted = false;
  std::vector<std::pair<std::size_t, std::size_t>> kappa_history;
  std::vector<long> s_history;
  std::vector<BranchEvent> trace;
  std::vector<std::string> notes;
};

struct ShortenResult {
  FRAut phi;
  std::vector<FPWord> image;
  ShortenReport report;
};

namespace detail {

struct BeamHit {
  FRAut psi;
  std::vector<FPWord> image;
  long value;
};

/// Beam search over FR⁰ words of length ≤ L minimising `objective`, keeping
/// only states accepted by `admissible`.
template <class Obj, class Adm>
BeamHit beam_search(const FreeProductSpec& sp, const std::vector<FRGen>& gens, const std::vector<FPWord>& start,
                    int length, int width, Obj&& objective, Adm&& admissible) {
  struct State {
    FRAut psi;
    std::vector<FPWord> set;
    long value;
  };
  BeamHit best{FRAut::identity(sp), start, objective(start)};
  std::vector<State> beam{{FRAut::identity(sp), start, best.value}};
  std::set<std::vector<FPWord>> seen{start};
  for (int depth = 0; depth < length; ++depth) {
    std::vector<State> next;
    for (const auto& st : beam)
      for (const auto& g : gens) {
        std::vector<FPWord> set;
        for (const auto& w : st.set) set.push_back(apply_gen(sp, g, w));
        if (!seen.insert(set).second || !admissible(set)) continue;
        long v = objective(set);
        next.push_back({st.psi.then(sp, g), std::move(set), v});
      }
    if (next.empty()) break;
    std::stable_sort(next.begin(), next.end(), [](const State& a, const State& b) { return a.value < b.value; });
    if (next.size() > static_cast<std::size_t>(width)) next.resize(static_cast<std::size_t>(width));
    if (next.front().value < best.value) best = {next.front().psi, next.front().set, next.front().value};
    beam = std::move(next);
  }
  return best;
}

inline std::vector<FPWord> gather(const std::vector<FPWord>& set, const std::vector<std::size_t>& idx) {
  std::vector<FPWord> out;
  for (auto k : idx) out.push_back(set[k]);
  return out;
}

}  // namespace detail

/// Shortens `input` (laid out like standard_set) by FR⁰ automorphisms,
/// following the induction's branch order: make a C-index D-indexed when its
/// image is short, merge two overlapping D-descriptors, else shorten the
/// whole set. Steps are accepted only if 𝔰 does not increase.
inline ShortenResult shorten(const FreeProductSpec& sp, std::optional<std::vector<FPWord>> input = {},
                             const ShortenBudget& budget = {}) {
  sp.validate();
  if (budget.word_length < 0 || budget.radius < 0 || budget.beam_width < 1)
    throw InputError("invalid shortening budget");
  std::vector<FPWord> cur = input ? *input : standard_set(sp);
  if (cur.size() != standard_set(sp).size()) throw InputError("input set must match the standard layout");

  ShortenResult res{FRAut::identity(sp), {}, {}};
  ShortenReport& rep = res.report;
  const long gr = sp.grushko_rank();

  for (const auto& set : sp.gen_sets) {
    bool trivial = std::all_of(set.begin(), set.end(), [](const FPWord& w) { return w.is_identity(); });
    if (!trivial) rep.D = std::max(rep.D, s_functional(sp, set, budget.radius).value);
  }
  rep.K = bound_constant(sp.factors(), sp.free_rank, static_cast<long>(cur.size()), gr);
  rep.bound = rep.K * std::max(1L, rep.D);

  // Members of each descriptor, as positions in `cur`.
  std::vector<std::vector<std::size_t>> members;
  std::vector<bool> in_c;
  std::size_t pos = 0;
  for (const auto& set : sp.gen_sets) {
    std::vector<std::size_t> m;
    for (std::size_t k = 0; k < set.size(); ++k) m.push_back(pos++);
    members.push_back(m);
    in_c.push_back(false);
  }
  for (int j = 0; j < sp.free_rank; ++j) {
    members.push_back({pos++});
    in_c.push_back(true);
  }
  auto kappa = [&] {
    return std::make_pair(members.size(), static_cast<std::size_t>(std::count(in_c.begin(), in_c.end(), true)));
  };

  auto gens = fr_generators(sp).fr0;
  auto s_of = [&](const std::vector<FPWord>& set) { return s_descent_value(sp, set); };
  long s_cur = s_of(cur);
  rep.s_initial = s_cur;
  rep.s_history.push_back(s_cur);
  rep.kappa_history.push_back(kappa());
  auto not_worse = [&](const std::vector<FPWord>& set) { return s_of(set) <= s_cur; };
  auto accept = [&](const detail::BeamHit& hit) {
    if (hit.psi.word.empty()) return;
    for (auto it = hit.psi.word.rbegin(); it != hit.psi.word.rend(); ++it) res.phi = res.phi.then(sp, *it);
    cur = hit.image;
    s_cur = s_of(cur);
    rep.s_history.push_back(s_cur);
  };

  const long make_d_threshold = 24 * gr * gr * gr * rep.D;
  for (;;) {
    bool moved = false;
    // Branch (i).
    for (std::size_t i = 0; i < members.size() && !moved; ++i) {
      if (!in_c[i]) continue;
      std::size_t p = members[i][0];
      auto ell = [&](const std::vector<FPWord>& set) { return gamma_translation_length(sp, set[p]); };
      detail::BeamHit hit{FRAut::identity(sp), cur, ell(cur)};
      if (hit.value > make_d_threshold)
        hit = detail::beam_search(sp, gens, cur, budget.word_length, budget.beam_width, ell, not_worse);
      BranchEvent ev{"make-D", {i}, s_cur, s_cur, make_d_threshold, hit.value <= make_d_threshold, ""};
      if (!ev.target_met) {
        rep.notes.push_back("no short image found for C-index " + std::to_string(i) + " within the word budget");
        continue;
      }
      accept(hit);
      in_c[i] = false;
      ev.s_after = s_cur;
      ev.note = "translation length " + std::to_string(hit.value);
      rep.trace.push_back(ev);
      rep.kappa_history.push_back(kappa());
      moved = true;
    }
    if (moved) continue;
    // Branch (ii).
    for (std::size_t i = 0; i < members.size() && !moved; ++i)
      for (std::size_t j = i + 1; j < members.size() && !moved; ++j) {
        if (in_c[i] || in_c[j]) continue;
        if (!descriptors_overlap(sp, detail::gather(cur, members[i]), detail::gather(cur, members[j]))) continue;
        std::vector<std::size_t> both = members[i];
        both.insert(both.end(), members[j].begin(), members[j].end());
        auto pair_s = [&](const std::vector<FPWord>& set) { return s_of(detail::gather(set, both)); };
        auto hit = detail::beam_search(sp, gens, cur, budget.word_length, budget.beam_width, pair_s, not_worse);
        long target = 2 * rep.D * (1 + static_cast<long>(members[i].size() + members[j].size()));
        BranchEvent ev{"merge", {i, j}, s_cur, s_cur, target, hit.value <= target, ""};
        accept(hit);
        ev.s_after = s_cur;
        ev.note = "pair value " + std::to_string(hit.value);
        if (!ev.target_met) rep.notes.push_back("merge of " + std::to_string(i) + "," + std::to_string(j) +
                                                " above the pair target within the word budget");
        members[i] = both;
        members.erase(members.begin() + static_cast<std::ptrdiff_t>(j));
        in_c.erase(in_c.begin() + static_cast<std::ptrdiff_t>(j));
        rep.trace.push_back(ev);
        rep.kappa_history.push_back(kappa());
        moved = true;
      }
    if (moved) continue;
    // Terminal branch.
    BranchEvent ev{"terminal", {}, s_cur, s_cur, 5 * gr * static_cast<long>(cur.size()) * rep.D, false, ""};
    int round = 0;
    for (; round < budget.max_rounds; ++round) {
      auto hit = detail::beam_search(sp, gens, cur, budget.word_length, budget.beam_width, s_of, not_worse);
      if (hit.value >= s_cur) break;
      accept(hit);
    }
    rep.budget_exhausted = round == budget.max_rounds;
    ev.s_after = s_cur;
    ev.target_met = s_cur <= ev.target;
    if (!ev.target_met) rep.notes.push_back("terminal value above the per-branch target");
    rep.trace.push_back(ev);
    break;
  }

  auto final_value = s_functional(sp, cur, budget.radius);
  rep.s_final = final_value.value;
  rep.certified = final_value.certified && !rep.budget_exhausted;
  rep.within_bound = rep.s_final <= rep.bound;
  res.image = cur;
  return res;
}

inline nlohmann::json shorten_to_json(const FreeProductSpec& sp, const ShortenResult& r) {
  nlohmann::json trace = nlohmann::json::array(), kh = nlohmann::json::array(), img = nlohmann::json::array();
  for (const auto& e : r.report.trace)
    trace.push_back({{"branch", e.branch},
                     {"indices", e.indices},
                     {"s_before", e.s_before},
                     {"s_after", e.s_after},
                     {"target", e.target},
                     {"target_met", e.target_met},
                     {"note", e.note}});
  for (const auto& [a, b] : r.report.kappa_history) kh.push_back({a, b});
  for (const auto& w : r.image) img.push_back(fp_to_json(sp, w));
  return {{"automorphism", fr_to_json(sp, r.phi)},
          {"image", img},
          {"D", r.report.D},
          {"K", r.report.K},
          {"bound", r.report.bound},
          {"s_initial", r.report.s_initial},
          {"s_final", r.report.s_final},
          {"s_history", r.report.s_history},
          {"within_bound", r.report.within_bound},
          {"certified", r.report.certified},
          {"kappa_history", kh},
          {"trace", trace},
          {"notes", r.report.notes},
          {"provenance", "search-with-cap"}};
}

}  // namespace twistbench
