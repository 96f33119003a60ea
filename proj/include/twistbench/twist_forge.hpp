#pragma once

// Automorphisms of A_Γ: the Laurence–Servatius generators, generic Dehn twists
// over one-edge splittings, composition and inversion, and the twist taxonomy.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "twistbench/errors.hpp"
#include "twistbench/graph_core.hpp"
#include "twistbench/raag_words.hpp"

namespace twistbench {

enum class AutKind { Inversion, GraphAut, Transvection, PartialConjugation, GenericTwist, Composite };

struct AutTag {
  AutKind kind = AutKind::Composite;
  Vertex v = 0;               // inversion / transvection source / conjugating vertex
  Vertex w = 0;               // transvection multiplier
  VertexSet conjugated;       // partial conjugation support C

  static AutTag of(AutKind k, Vertex v = 0, Vertex w = 0) {
    AutTag t;
    t.kind = k;
    t.v = v;
    t.w = w;
    return t;
  }

  std::string describe(const SimplicialGraph& g) const {
    switch (kind) {
      case AutKind::Inversion: return "inversion(" + g.label(v) + ")";
      case AutKind::GraphAut: return "graph_aut";
      case AutKind::Transvection: return "transvection(" + g.label(v) + "," + g.label(w) + ")";
      case AutKind::PartialConjugation: {
        std::string s = "partial_conjugation(" + g.label(v) + ",{";
        bool first = true;
        for (Vertex u : conjugated.elements()) {
          s += (first ? "" : ",") + g.label(u);
          first = false;
        }
        return s + "})";
      }
      case AutKind::GenericTwist: return "generic_twist";
      case AutKind::Composite: return "composite";
    }
    return "?";
  }
};

class RaagAut {
 public:
  RaagAut() = default;

  /// Unverified map from generator images; call verify() with an inverse.
  RaagAut(GraphPtr g, std::vector<NormalWord> images, AutTag tag)
      : graph_(std::move(g)), images_(std::move(images)), tag_(std::move(tag)) {
    if (images_.size() != graph_->size()) throw InputError("one image per vertex required");
    for (const auto& w : images_) check_same_graph(w, NormalWord(graph_));
  }

  static RaagAut identity(const GraphPtr& g) {
    std::vector<NormalWord> im;
    for (Vertex v = 0; v < g->size(); ++v) im.push_back(NormalWord::generator(g, v));
    RaagAut a(g, im, AutTag::of(AutKind::Composite));
    a.inverse_images_ = a.images_;
    a.verified_ = true;
    return a;
  }

  const GraphPtr& graph_ptr() const { return graph_; }
  const SimplicialGraph& graph() const { return *graph_; }
  const std::vector<NormalWord>& images() const { return images_; }
  const NormalWord& image(Vertex v) const { return images_.at(v); }
  const AutTag& tag() const { return tag_; }
  bool verified() const { return verified_; }
  const std::optional<std::vector<NormalWord>>& inverse_images() const { return inverse_images_; }

  NormalWord apply(const NormalWord& u) const { return substitute(images_, u); }

  /// Checks the edge relations and that `inverse` is a two-sided inverse.
  /// Returns a description of the first failure, or nothing on success.
  std::optional<std::string> check(const std::vector<NormalWord>& inverse) const {
    if (auto bad = first_broken_relation(images_)) return bad;
    if (auto bad = first_broken_relation(inverse)) return "inverse: " + *bad;
    for (Vertex v = 0; v < graph_->size(); ++v) {
      auto gen = NormalWord::generator(graph_, v);
      if (!(substitute(images_, substitute(inverse, gen)) == gen) ||
          !(substitute(inverse, substitute(images_, gen)) == gen))
        return "inverse fails on generator " + graph_->label(v);
    }
    return std::nullopt;
  }

  RaagAut& verify_with(std::vector<NormalWord> inverse) {
    if (auto bad = check(inverse)) throw ContractError("not an automorphism: " + *bad);
    inverse_images_ = std::move(inverse);
    verified_ = true;
    return *this;
  }

  static NormalWord substitute(const std::vector<NormalWord>& images, const NormalWord& u) {
    Letters raw;
    for (const Letter& l : u.letters()) {
      const auto& im = images.at(l.vertex).letters();
      if (l.sign > 0)
        raw.insert(raw.end(), im.begin(), im.end());
      else {
        auto inv = words::inverse_letters(im);
        raw.insert(raw.end(), inv.begin(), inv.end());
      }
    }
    return NormalWord(u.graph_ptr(), raw);
  }

 private:
  std::optional<std::string> first_broken_relation(const std::vector<NormalWord>& ims) const {
    for (auto [u, w] : graph_->edges()) {
      NormalWord c = commutator(ims[u], ims[w]);
      if (!c.is_identity())
        return "[" + graph_->label(u) + "," + graph_->label(w) + "] maps to " +
               word_to_json(c).dump();
    }
    return std::nullopt;
  }

  GraphPtr graph_;
  std::vector<NormalWord> images_;
  std::optional<std::vector<NormalWord>> inverse_images_;
  AutTag tag_;
  bool verified_ = false;
};

inline NormalWord apply(const RaagAut& f, const NormalWord& u) {
  check_same_graph(NormalWord(f.graph_ptr()), u);
  return f.apply(u);
}

/// f ∘ g: apply g first.
inline RaagAut compose(const RaagAut& f, const RaagAut& g) {
  if (!(f.graph() == g.graph())) throw InputError("automorphisms on different graphs");
  std::vector<NormalWord> im;
  for (const auto& gi : g.images()) im.push_back(f.apply(gi));
  RaagAut out(f.graph_ptr(), im, AutTag::of(AutKind::Composite));
  if (f.verified() && g.verified()) {
    std::vector<NormalWord> inv;
    for (const auto& fi : *f.inverse_images()) inv.push_back(RaagAut::substitute(*g.inverse_images(), fi));
    out.verify_with(inv);
  }
  return out;
}

inline RaagAut inverse(const RaagAut& f) {
  if (!f.verified()) throw ContractError("inverse requires a verified automorphism");
  AutTag tag = f.tag();
  if (tag.kind != AutKind::Inversion && tag.kind != AutKind::GraphAut) tag.kind = AutKind::Composite;
  RaagAut out(f.graph_ptr(), *f.inverse_images(), tag);
  out.verify_with(f.images());
  return out;
}

// ---------------------------------------------------------------------------
// Generators.

inline RaagAut inversion(const GraphPtr& g, Vertex v) {
  check_vertex(*g, v);
  std::vector<NormalWord> im;
  for (Vertex u = 0; u < g->size(); ++u) im.push_back(NormalWord::generator(g, u, u == v ? -1 : 1));
  RaagAut a(g, im, AutTag::of(AutKind::Inversion, v));
  a.verify_with(im);
  return a;
}

/// Graph automorphism given as a vertex permutation.
inline RaagAut graph_aut(const GraphPtr& g, const std::vector<Vertex>& perm) {
  if (perm.size() != g->size()) throw InputError("permutation size mismatch");
  std::vector<NormalWord> im(g->size()), inv(g->size());
  std::vector<bool> hit(g->size(), false);
  for (Vertex u = 0; u < g->size(); ++u) {
    check_vertex(*g, perm[u]);
    if (hit[perm[u]]) throw InputError("not a permutation");
    hit[perm[u]] = true;
    im[u] = NormalWord::generator(g, perm[u]);
    inv[perm[u]] = NormalWord::generator(g, u);
  }
  for (auto [u, w] : g->edges())
    if (!g->adjacent(perm[u], perm[w])) throw InputError("permutation does not preserve edges");
  RaagAut a(g, im, AutTag::of(AutKind::GraphAut));
  a.verify_with(inv);
  return a;
}

inline bool dominates(const SimplicialGraph& g, Vertex v, Vertex w) {
  return v != w && link(g, v).subset_of(star(g, w));
}

/// v ↦ v w.
inline RaagAut transvection(const GraphPtr& g, Vertex v, Vertex w) {
  check_vertex(*g, v);
  check_vertex(*g, w);
  if (!dominates(*g, v, w)) throw ContractError("transvection requires lk(v) ⊆ St(w), v ≠ w");
  std::vector<NormalWord> im, inv;
  for (Vertex u = 0; u < g->size(); ++u) {
    Letters x{{u, 1}}, y{{u, 1}};
    if (u == v) {
      x.push_back({w, 1});
      y.push_back({w, -1});
    }
    im.emplace_back(g, x);
    inv.emplace_back(g, y);
  }
  RaagAut a(g, im, AutTag::of(AutKind::Transvection, v, w));
  a.verify_with(inv);
  return a;
}

/// Conjugates the generators in `c` by v; `c` must be a union of components of Γ∖St(v).
inline RaagAut partial_conjugation(const GraphPtr& g, Vertex v, const VertexSet& c) {
  check_vertex(*g, v);
  const VertexSet rest = g->all() - star(*g, v);
  if (c.empty() || !c.subset_of(rest)) throw ContractError("support must lie in Γ∖St(v)");
  for (const auto& comp : components(*g, rest))
    if (comp.intersects(c) && !comp.subset_of(c))
      throw ContractError("support must be a union of components of Γ∖St(v)");
  std::vector<NormalWord> im, inv;
  for (Vertex u = 0; u < g->size(); ++u) {
    if (c.contains(u)) {
      im.emplace_back(g, Letters{{v, 1}, {u, 1}, {v, -1}});
      inv.emplace_back(g, Letters{{v, -1}, {u, 1}, {v, 1}});
    } else {
      im.push_back(NormalWord::generator(g, u));
      inv.push_back(NormalWord::generator(g, u));
    }
  }
  AutTag tag = AutTag::of(AutKind::PartialConjugation, v);
  tag.conjugated = c;
  RaagAut a(g, im, tag);
  a.verify_with(inv);
  return a;
}

inline constexpr std::size_t kMaxComponentsForEnumeration = 16;

/// Inversions, transvections v ↦ vw, and partial conjugations with nonempty
/// proper support.
inline std::vector<RaagAut> ls_generators(const GraphPtr& g) {
  std::vector<RaagAut> out;
  const std::size_t n = g->size();
  for (Vertex v = 0; v < n; ++v) out.push_back(inversion(g, v));
  for (Vertex v = 0; v < n; ++v)
    for (Vertex w = 0; w < n; ++w)
      if (dominates(*g, v, w)) out.push_back(transvection(g, v, w));
  for (Vertex v = 0; v < n; ++v) {
    auto comps = components(*g, g->all() - star(*g, v));
    if (comps.size() < 2) continue;
    if (comps.size() > kMaxComponentsForEnumeration)
      throw InputError("too many components to enumerate partial conjugations");
    const std::uint64_t full = (std::uint64_t{1} << comps.size()) - 1;
    for (std::uint64_t m = 1; m < full; ++m) {
      VertexSet c = g->empty_set();
      for (std::size_t i = 0; i < comps.size(); ++i)
        if ((m >> i) & 1u) c |= comps[i];
      out.push_back(partial_conjugation(g, v, c));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// One-edge splittings and generic Dehn twists.

struct SplittingSpec {
  enum class Kind { Amalgam, HNN } kind = Kind::Amalgam;
  VertexSet side1, side2;  // amalgam factors
  Vertex stable = 0;       // HNN stable letter

  static SplittingSpec amalgam(const SimplicialGraph& g, const VertexSet& d1, const VertexSet& d2) {
    SplittingSpec s{Kind::Amalgam, d1, d2, 0};
    s.validate(g);
    return s;
  }
  static SplittingSpec hnn(const SimplicialGraph& g, Vertex v) {
    check_vertex(g, v);
    return SplittingSpec{Kind::HNN, g.empty_set(), g.empty_set(), v};
  }

  VertexSet edge_set(const SimplicialGraph& g) const {
    return kind == Kind::Amalgam ? (side1 & side2) : link(g, stable);
  }

  void validate(const SimplicialGraph& g) const {
    if (kind == Kind::HNN) {
      check_vertex(g, stable);
      return;
    }
    if (!((side1 | side2) == g.all())) throw InputError("amalgam sides must cover Γ");
    const VertexSet d0 = side1 & side2;
    const VertexSet a = side1 - d0, b = side2 - d0;
    if (a.empty() || b.empty()) throw InputError("amalgam sides must both be proper");
    for (const auto& comp : components(g, g.all() - d0))
      if (comp.intersects(a) && comp.intersects(b))
        throw InputError("Δ1∩Δ2 does not separate the two sides");
  }
};

enum class TwistForm { AmalgamConj, HNNLeft, HNNRight };

inline std::optional<std::string> first_noncommuting(const NormalWord& z, const VertexSet& s) {
  for (Vertex u : s.elements()) {
    NormalWord c = commutator(z, NormalWord::generator(z.graph_ptr(), u));
    if (!c.is_identity())
      return "[z," + z.graph().label(u) + "] = " + word_to_json(c).dump();
  }
  return std::nullopt;
}

inline RaagAut generic_dehn_twist(const GraphPtr& g, const SplittingSpec& spec, TwistForm form,
                                  const NormalWord& z) {
  check_same_graph(NormalWord(g), z);
  spec.validate(*g);
  const bool amalgam_form = form == TwistForm::AmalgamConj;
  if (amalgam_form != (spec.kind == SplittingSpec::Kind::Amalgam))
    throw InputError("twist form does not match the splitting kind");
  const VertexSet edge = spec.edge_set(*g);
  if (auto bad = first_noncommuting(z, edge))
    throw InputError("multiplier does not centralise the edge group: " + *bad);

  std::vector<NormalWord> im, inv;
  const NormalWord zi = invert(z);
  if (amalgam_form) {
    if (!z.support().subset_of(spec.side2))
      throw InputError("multiplier must lie in the second vertex group");
    for (Vertex u = 0; u < g->size(); ++u) {
      auto gen = NormalWord::generator(g, u);
      im.push_back(spec.side2.contains(u) ? conjugate(gen, z) : gen);
      inv.push_back(spec.side2.contains(u) ? conjugate(gen, zi) : gen);
    }
  } else {
    if (z.support().contains(spec.stable))
      throw InputError("multiplier must avoid the stable letter");
    for (Vertex u = 0; u < g->size(); ++u) {
      auto gen = NormalWord::generator(g, u);
      if (u != spec.stable) {
        im.push_back(gen);
        inv.push_back(gen);
      } else if (form == TwistForm::HNNLeft) {
        im.push_back(multiply(z, gen));
        inv.push_back(multiply(zi, gen));
      } else {
        im.push_back(multiply(gen, z));
        inv.push_back(multiply(gen, zi));
      }
    }
  }
  RaagAut a(g, im, AutTag::of(AutKind::GenericTwist));
  a.verify_with(inv);
  return a;
}

// ---------------------------------------------------------------------------
// Taxonomy.

enum class TwistClass { CentraliserTwist, AsceticTwist };

struct TwistClassification {
  TwistClass verdict;
  VertexSet witness;  // the clique κ(v) for ascetic twists, empty otherwise
};

inline const char* to_string(TwistClass c) {
  return c == TwistClass::CentraliserTwist ? "CentraliserTwist" : "AsceticTwist";
}

inline TwistClassification classify_transvection(const SimplicialGraph& g, Vertex v, Vertex w) {
  check_vertex(g, v);
  check_vertex(g, w);
  if (!dominates(g, v, w)) throw ContractError("classify_transvection requires lk(v) ⊆ St(w)");
  const VertexSet lv = link(g, v);
  if (lv.subset_of(link(g, w))) return {TwistClass::CentraliserTwist, g.empty_set()};
  if (star(g, v).subset_of(star(g, w)) && is_intersection_of_stars(g, lv))
    return {TwistClass::CentraliserTwist, g.empty_set()};
  return {TwistClass::AsceticTwist, kappa(g, v)};
}

enum class DehnType { Fold, Skew, PartialConjugation };

inline const char* to_string(DehnType t) {
  switch (t) {
    case DehnType::Fold: return "Fold";
    case DehnType::Skew: return "Skew";
    case DehnType::PartialConjugation: return "PartialConjugation";
  }
  return "?";
}

struct DehnTypeResult {
  DehnType type;
  bool cmp;  // preserves convex-cocompact subgroups
};

inline DehnTypeResult dt_type_transvection(const SimplicialGraph& g, Vertex v, Vertex w) {
  if (!dominates(g, v, w)) throw ContractError("not a transvection pair");
  if (g.adjacent(v, w)) return {DehnType::Skew, false};
  return {DehnType::Fold, true};
}

inline DehnTypeResult dt_type(const RaagAut& f) {
  switch (f.tag().kind) {
    case AutKind::Transvection: return dt_type_transvection(f.graph(), f.tag().v, f.tag().w);
    case AutKind::PartialConjugation: return {DehnType::PartialConjugation, true};
    default: throw ContractError("dt_type needs a transvection or partial conjugation");
  }
}

// ---------------------------------------------------------------------------
// Wire format.

inline nlohmann::json aut_to_json(const RaagAut& f) {
  nlohmann::json images = nlohmann::json::object();
  for (Vertex v = 0; v < f.graph().size(); ++v) images[f.graph().label(v)] = word_to_json(f.image(v));
  return {{"images", images}, {"tag", f.tag().describe(f.graph())}, {"verified", f.verified()}};
}

/// Reads {"images": {...}}; vertices without an entry are fixed. The result is unverified.
inline RaagAut aut_from_json(const GraphPtr& g, const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("images") || !j["images"].is_object())
    throw InputError("automorphism must be an object with an \"images\" map");
  std::vector<NormalWord> im;
  for (Vertex v = 0; v < g->size(); ++v) im.push_back(NormalWord::generator(g, v));
  for (const auto& [k, val] : j["images"].items()) im[g->index_of(k)] = word_from_json(g, val);
  return RaagAut(g, im, AutTag::of(AutKind::Composite));
}

}  // namespace twistbench
