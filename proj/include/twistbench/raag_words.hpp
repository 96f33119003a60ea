#pragma once

// Element arithmetic in the right-angled Artin group A_Γ.
//
// A NormalWord is the lexicographically least reduced word representing its
// element, with letters ordered by (vertex index, sign) and v before v^{-1}.
// Reduction works by shuffle cancellation: a new letter cancels against an
// inverse it can commute up to. Lex-minimisation is the greedy trace normal
// form (repeatedly emit the least letter that commutes to the front).

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "twistbench/errors.hpp"
#include "twistbench/graph_core.hpp"

namespace twistbench {

struct Letter {
  Vertex vertex = 0;
  int sign = 1;  // +1 or -1

  Letter inverse() const { return {vertex, -sign}; }
  std::uint32_t key() const { return static_cast<std::uint32_t>(2 * vertex + (sign < 0 ? 1 : 0)); }
  friend bool operator==(const Letter&, const Letter&) = default;
  friend bool operator<(const Letter& a, const Letter& b) { return a.key() < b.key(); }
};

using Letters = std::vector<Letter>;
using GraphPtr = std::shared_ptr<const SimplicialGraph>;

namespace words {

/// Distinct adjacent vertices commute; a letter never commutes past its own vertex.
inline bool commute(const SimplicialGraph& g, const Letter& a, const Letter& b) {
  return a.vertex != b.vertex && g.adjacent(a.vertex, b.vertex);
}

/// Right-multiplies a reduced word by one letter, keeping it reduced.
inline void append_reduced(const SimplicialGraph& g, Letters& w, Letter y) {
  for (std::size_t j = w.size(); j-- > 0;) {
    const Letter& z = w[j];
    if (z.vertex == y.vertex) {
      if (z.sign == -y.sign) {
        w.erase(w.begin() + static_cast<std::ptrdiff_t>(j));
        return;
      }
      break;
    }
    if (!g.adjacent(z.vertex, y.vertex)) break;
  }
  w.push_back(y);
}

/// Left-multiplies a reduced word by one letter, keeping it reduced.
inline void prepend_reduced(const SimplicialGraph& g, Letters& w, Letter y) {
  for (std::size_t j = 0; j < w.size(); ++j) {
    const Letter& z = w[j];
    if (z.vertex == y.vertex) {
      if (z.sign == -y.sign) {
        w.erase(w.begin() + static_cast<std::ptrdiff_t>(j));
        return;
      }
      break;
    }
    if (!g.adjacent(z.vertex, y.vertex)) break;
  }
  w.insert(w.begin(), y);
}

inline Letters reduce(const SimplicialGraph& g, const Letters& raw) {
  Letters w;
  w.reserve(raw.size());
  for (const Letter& l : raw) append_reduced(g, w, l);
  return w;
}

/// Least shuffle-equivalent rearrangement of a reduced word.
inline Letters lex_least(const SimplicialGraph& g, Letters w) {
  Letters out;
  out.reserve(w.size());
  while (!w.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < w.size(); ++i) {
      if (!(w[i] < w[best])) continue;
      bool available = true;
      for (std::size_t j = 0; j < i && available; ++j) available = commute(g, w[j], w[i]);
      if (available) best = i;
    }
    out.push_back(w[best]);
    w.erase(w.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return out;
}

inline Letters normal_letters(const SimplicialGraph& g, const Letters& raw) {
  return lex_least(g, reduce(g, raw));
}

/// True iff `x + [y]` is again in lexicographic normal form, given `x` is.
inline bool extends_normal_form(const SimplicialGraph& g, const Letters& x, Letter y) {
  for (std::size_t j = x.size(); j-- > 0;) {
    const Letter& z = x[j];
    if (z.vertex == y.vertex) return z.sign == y.sign;
    if (!g.adjacent(z.vertex, y.vertex)) return true;
    if (y < z) return false;
  }
  return true;
}

inline Letters inverse_letters(const Letters& w) {
  Letters out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(it->inverse());
  return out;
}

/// Position of a letter that can be shuffled to the front / back, if any.
inline bool is_first_letter(const SimplicialGraph& g, const Letters& w, std::size_t i) {
  for (std::size_t j = 0; j < i; ++j)
    if (!commute(g, w[j], w[i])) return false;
  return true;
}
inline bool is_last_letter(const SimplicialGraph& g, const Letters& w, std::size_t i) {
  for (std::size_t j = i + 1; j < w.size(); ++j)
    if (!commute(g, w[j], w[i])) return false;
  return true;
}

}  // namespace words

class NormalWord {
 public:
  NormalWord() = default;
  explicit NormalWord(GraphPtr g) : graph_(std::move(g)) {}

  /// Normalizes an arbitrary letter sequence.
  NormalWord(GraphPtr g, const Letters& raw) : graph_(std::move(g)) {
    for (const Letter& l : raw)
      if (l.vertex >= graph_->size() || (l.sign != 1 && l.sign != -1))
        throw InputError("letter outside the ambient graph");
    letters_ = words::normal_letters(*graph_, raw);
  }

  static NormalWord generator(GraphPtr g, Vertex v, int sign = 1) {
    return NormalWord(std::move(g), Letters{{v, sign}});
  }

  const GraphPtr& graph_ptr() const { return graph_; }
  const SimplicialGraph& graph() const { return *graph_; }
  const Letters& letters() const { return letters_; }
  std::size_t length() const { return letters_.size(); }
  bool is_identity() const { return letters_.empty(); }

  std::size_t count(Vertex v) const {
    return static_cast<std::size_t>(std::count_if(
        letters_.begin(), letters_.end(), [v](const Letter& l) { return l.vertex == v; }));
  }
  VertexSet support() const {
    VertexSet s(graph_->size());
    for (const Letter& l : letters_) s.insert(l.vertex);
    return s;
  }

  friend bool operator==(const NormalWord& a, const NormalWord& b) {
    return a.letters_ == b.letters_;
  }
  friend bool operator<(const NormalWord& a, const NormalWord& b) {
    if (a.letters_.size() != b.letters_.size()) return a.letters_.size() < b.letters_.size();
    return std::lexicographical_compare(a.letters_.begin(), a.letters_.end(),
                                        b.letters_.begin(), b.letters_.end());
  }

 private:
  GraphPtr graph_;
  Letters letters_;
};

inline void check_same_graph(const NormalWord& a, const NormalWord& b) {
  if (a.graph_ptr() == b.graph_ptr()) return;
  if (!a.graph_ptr() || !b.graph_ptr() || !(a.graph() == b.graph()))
    throw InputError("words live in different ambient graphs");
}

inline NormalWord identity(const GraphPtr& g) { return NormalWord(g); }

inline NormalWord multiply(const NormalWord& u, const NormalWord& v) {
  check_same_graph(u, v);
  Letters raw = u.letters();
  raw.insert(raw.end(), v.letters().begin(), v.letters().end());
  return NormalWord(u.graph_ptr(), raw);
}

inline NormalWord invert(const NormalWord& u) {
  return NormalWord(u.graph_ptr(), words::inverse_letters(u.letters()));
}

/// g u g^{-1}
inline NormalWord conjugate(const NormalWord& u, const NormalWord& g) {
  check_same_graph(u, g);
  Letters raw = g.letters();
  raw.insert(raw.end(), u.letters().begin(), u.letters().end());
  auto gi = words::inverse_letters(g.letters());
  raw.insert(raw.end(), gi.begin(), gi.end());
  return NormalWord(u.graph_ptr(), raw);
}

inline NormalWord commutator(const NormalWord& a, const NormalWord& b) {
  return multiply(multiply(a, b), multiply(invert(a), invert(b)));
}

inline NormalWord power(const NormalWord& u, int n) {
  NormalWord base = n < 0 ? invert(u) : u;
  NormalWord out(u.graph_ptr());
  for (int i = 0; i < std::abs(n); ++i) out = multiply(out, base);
  return out;
}

// ---------------------------------------------------------------------------
// Cyclic reduction and translation lengths.

struct CyclicReduction {
  NormalWord core;
  NormalWord conjugator;  // u = conjugator · core · conjugator^{-1}
};

inline CyclicReduction cyclically_reduce(const NormalWord& u) {
  const SimplicialGraph& g = u.graph();
  Letters w = u.letters();
  Letters conj;
  for (;;) {
    std::optional<std::pair<std::size_t, std::size_t>> pick;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (!words::is_first_letter(g, w, i)) continue;
      for (std::size_t j = w.size(); j-- > 0;) {
        if (j == i || w[j] != w[i].inverse() || !words::is_last_letter(g, w, j)) continue;
        if (!pick || w[i] < w[pick->first]) pick = std::make_pair(i, j);
      }
    }
    if (!pick) break;
    conj.push_back(w[pick->first]);
    auto [i, j] = *pick;
    w.erase(w.begin() + static_cast<std::ptrdiff_t>(std::max(i, j)));
    w.erase(w.begin() + static_cast<std::ptrdiff_t>(std::min(i, j)));
  }
  return {NormalWord(u.graph_ptr(), w), NormalWord(u.graph_ptr(), conj)};
}

/// ℓ(u; X_Γ): length of the cyclically reduced core.
inline std::size_t trans_len_X(const NormalWord& u) { return cyclically_reduce(u).core.length(); }

/// ℓ(u; T^v): number of v-letters in the cyclically reduced core.
inline std::size_t trans_len_Tv(const NormalWord& u, Vertex v) {
  check_vertex(u.graph(), v);
  return cyclically_reduce(u).core.count(v);
}

// ---------------------------------------------------------------------------
// Finite subsets and the set functionals.

class FiniteSubset {
 public:
  FiniteSubset() = default;
  explicit FiniteSubset(std::vector<NormalWord> elems) {
    for (auto& e : elems) insert(std::move(e));
  }
  void insert(NormalWord w) {
    if (!elems_.empty()) check_same_graph(elems_.front(), w);
    auto it = std::lower_bound(elems_.begin(), elems_.end(), w);
    if (it == elems_.end() || !(*it == w)) elems_.insert(it, std::move(w));
  }
  const std::vector<NormalWord>& elements() const { return elems_; }
  std::size_t size() const { return elems_.size(); }
  bool empty() const { return elems_.empty(); }
  bool contains(const NormalWord& w) const {
    return std::binary_search(elems_.begin(), elems_.end(), w);
  }
  bool contains_identity() const { return !elems_.empty() && elems_.front().is_identity(); }
  bool symmetric() const {
    return std::all_of(elems_.begin(), elems_.end(),
                       [this](const NormalWord& w) { return contains(invert(w)); });
  }
  friend bool operator==(const FiniteSubset& a, const FiniteSubset& b) {
    return a.elems_ == b.elems_;
  }

 private:
  std::vector<NormalWord> elems_;  // sorted, distinct
};

/// ℓ(Ω; X) = Σ_{s∈Ω} ℓ(s; X). The displayed definition has ℓ(s; Ω) in the
/// summand, which is read as ℓ(s; X).
inline std::size_t ell_set(const FiniteSubset& omega) {
  std::size_t total = 0;
  for (const auto& s : omega.elements()) total += trans_len_X(s);
  return total;
}

inline FiniteSubset square_set(const FiniteSubset& omega) {
  FiniteSubset out;
  for (const auto& a : omega.elements())
    for (const auto& b : omega.elements()) out.insert(multiply(a, b));
  return out;
}

struct Displacement {
  std::size_t value = 0;
  bool certified = false;
  NormalWord minimizer;           // shortest vertex realising `value`
  std::size_t searched_radius = 0;
  std::size_t ball_size = 0;
};

/// 𝔱(Ω; X_Γ) over the ball of radius R: min over group elements x with |x| ≤ R
/// of max_s |x^{-1} s x|. Certified iff some minimizer has |x| ≤ R-1.
inline Displacement t_displacement(const FiniteSubset& omega, long radius) {
  if (radius < 0) throw InputError("negative search radius");
  if (omega.empty()) throw InputError("t_displacement of an empty set");
  const GraphPtr& gp = omega.elements().front().graph_ptr();
  const SimplicialGraph& g = *gp;
  const std::size_t R = static_cast<std::size_t>(radius);

  std::vector<Letters> conj;
  for (const auto& s : omega.elements()) conj.push_back(s.letters());

  Displacement best;
  best.value = SIZE_MAX;
  best.searched_radius = R;
  Letters x;
  Letters best_x;
  std::size_t best_len = SIZE_MAX;

  auto score = [&](const std::vector<Letters>& cs) {
    std::size_t m = 0;
    for (const auto& c : cs) m = std::max(m, c.size());
    return m;
  };

  // Depth-first over lexicographic normal forms: each element exactly once.
  std::function<void(std::vector<Letters>&)> visit = [&](std::vector<Letters>& cs) {
    ++best.ball_size;
    std::size_t val = score(cs);
    if (val < best.value || (val == best.value && x.size() < best_len)) {
      best.value = val;
      best_len = x.size();
      best_x = x;
    }
    if (x.size() == R) return;
    for (Vertex v = 0; v < g.size(); ++v) {
      for (int sign : {1, -1}) {
        Letter y{v, sign};
        if (!words::extends_normal_form(g, x, y)) continue;
        std::vector<Letters> next = cs;
        for (auto& c : next) {
          words::prepend_reduced(g, c, y.inverse());
          words::append_reduced(g, c, y);
        }
        x.push_back(y);
        visit(next);
        x.pop_back();
      }
    }
  };
  visit(conj);
  best.certified = best_len < R;
  best.minimizer = NormalWord(gp, best_x);
  return best;
}

inline long default_radius(const FiniteSubset& omega) {
  std::size_t r = 0;
  for (const auto& s : omega.elements()) r = std::max(r, s.length());
  return static_cast<long>(r);
}

// ---------------------------------------------------------------------------
// Reference systems and the induced comparison.

struct ReferenceData {
  std::vector<std::pair<std::string, FiniteSubset>> levels;  // in ≪ order

  void validate() const {
    for (const auto& [name, s] : levels) {
      if (!s.contains_identity()) throw InputError("S_" + name + " must contain the identity");
      if (!s.symmetric()) throw InputError("S_" + name + " must be closed under inverses");
    }
  }
};

enum class Comparison { Less, Equivalent, Greater };

inline const char* to_string(Comparison c) {
  switch (c) {
    case Comparison::Less: return "Less";
    case Comparison::Equivalent: return "Equivalent";
    case Comparison::Greater: return "Greater";
  }
  return "?";
}

/// Compares ℓ(φ(S_H)²) against ℓ(ψ(S_H)²) level by level in ≪ order.
inline Comparison compare_reference(const std::vector<FiniteSubset>& phi_images,
                                    const std::vector<FiniteSubset>& psi_images,
                                    const ReferenceData& ref) {
  if (phi_images.size() != ref.levels.size() || psi_images.size() != ref.levels.size())
    throw InputError("image lists must align with the reference system");
  for (std::size_t h = 0; h < ref.levels.size(); ++h) {
    std::size_t a = ell_set(square_set(phi_images[h]));
    std::size_t b = ell_set(square_set(psi_images[h]));
    if (a < b) return Comparison::Less;
    if (a > b) return Comparison::Greater;
  }
  return Comparison::Equivalent;
}

// ---------------------------------------------------------------------------
// Wire format: JSON array of signed tokens, "-a" is a^{-1}.

inline Letters letters_from_json(const SimplicialGraph& g, const nlohmann::json& j) {
  if (!j.is_array()) throw InputError("a word must be a JSON array of tokens");
  Letters out;
  for (const auto& t : j) {
    if (!t.is_string()) throw InputError("word tokens must be strings");
    std::string s = t.get<std::string>();
    int sign = 1;
    if (!s.empty() && s[0] == '-') {
      sign = -1;
      s = s.substr(1);
    }
    out.push_back({g.index_of(s), sign});
  }
  return out;
}

inline NormalWord word_from_json(const GraphPtr& g, const nlohmann::json& j) {
  return NormalWord(g, letters_from_json(*g, j));
}

inline nlohmann::json word_to_json(const NormalWord& w) {
  nlohmann::json out = nlohmann::json::array();
  for (const Letter& l : w.letters())
    out.push_back((l.sign < 0 ? "-" : "") + w.graph().label(l.vertex));
  return out;
}

/// Parses "a b -c" or "a,b,-c" style word literals (used in tests and the CLI).
inline NormalWord parse_word(const GraphPtr& g, const std::string& text) {
  Letters out;
  std::string tok;
  auto flush = [&] {
    if (tok.empty()) return;
    int sign = 1;
    std::string s = tok;
    if (s[0] == '-') {
      sign = -1;
      s = s.substr(1);
    }
    out.push_back({g->index_of(s), sign});
    tok.clear();
  };
  for (char c : text) {
    if (c == ' ' || c == ',')
      flush();
    else
      tok.push_back(c);
  }
  flush();
  return NormalWord(g, out);
}

}  // namespace twistbench
