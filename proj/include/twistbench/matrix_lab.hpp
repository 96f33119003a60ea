#pragma once

// Integer lattices and SL_n(Z): Smith and Hermite forms, saturation,
// complements, elementary automorphisms, and finite-index decisions for
// groups generated by elementary matrices.
//
// Convention: vectors are rows and a matrix M acts by v ↦ v·M.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "twistbench/coset_enum.hpp"
#include "twistbench/errors.hpp"

namespace twistbench {

using Int = std::int64_t;
using IntVector = std::vector<Int>;
using IntMatrix = std::vector<IntVector>;

namespace checked {
inline Int add(Int a, Int b) {
  Int r;
  if (__builtin_add_overflow(a, b, &r)) throw ContractError("integer overflow");
  return r;
}
inline Int sub(Int a, Int b) {
  Int r;
  if (__builtin_sub_overflow(a, b, &r)) throw ContractError("integer overflow");
  return r;
}
inline Int mul(Int a, Int b) {
  Int r;
  if (__builtin_mul_overflow(a, b, &r)) throw ContractError("integer overflow");
  return r;
}
/// Floor division.
inline Int fdiv(Int a, Int b) {
  Int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}
}  // namespace checked

inline IntMatrix identity_matrix(std::size_t n) {
  IntMatrix m(n, IntVector(n, 0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

inline std::size_t cols_of(const IntMatrix& m, std::size_t fallback = 0) {
  return m.empty() ? fallback : m.front().size();
}

inline IntMatrix matmul(const IntMatrix& a, const IntMatrix& b) {
  const std::size_t n = a.size(), k = b.size(), p = cols_of(b);
  for (const auto& row : a)
    if (row.size() != k) throw InputError("matrix dimension mismatch");
  IntMatrix out(n, IntVector(p, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      if (a[i][j] == 0) continue;
      for (std::size_t c = 0; c < p; ++c)
        out[i][c] = checked::add(out[i][c], checked::mul(a[i][j], b[j][c]));
    }
  return out;
}

inline IntVector vecmat(const IntVector& v, const IntMatrix& m) {
  return matmul(IntMatrix{v}, m).front();
}

/// Determinant by fraction-free (Bareiss) elimination.
inline Int determinant(IntMatrix m) {
  const std::size_t n = m.size();
  for (const auto& r : m)
    if (r.size() != n) throw InputError("determinant of a non-square matrix");
  if (n == 0) return 1;
  Int sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t p = k + 1;
      while (p < n && m[p][k] == 0) ++p;
      if (p == n) return 0;
      std::swap(m[p], m[k]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        m[i][j] = checked::sub(checked::mul(m[i][j], m[k][k]), checked::mul(m[i][k], m[k][j])) / prev;
    prev = m[k][k];
  }
  return checked::mul(sign, m[n - 1][n - 1]);
}

// ---------------------------------------------------------------------------
// Smith normal form.

struct SmithForm {
  IntMatrix U, D, V;          // M = U · D · V
  IntMatrix U_inv, V_inv;     // U_inv · M · V_inv = D
  std::vector<Int> invariants;  // nonzero diagonal entries, each dividing the next
};

inline SmithForm smith_normal_form(const IntMatrix& input) {
  const std::size_t rows = input.size(), cols = cols_of(input);
  for (const auto& r : input)
    if (r.size() != cols) throw InputError("ragged matrix");
  IntMatrix m = input;
  IntMatrix L = identity_matrix(rows), Linv = identity_matrix(rows);
  IntMatrix R = identity_matrix(cols), Rinv = identity_matrix(cols);

  // row_j += k row_i
  auto row_add = [&](std::size_t j, std::size_t i, Int k) {
    if (k == 0) return;
    for (std::size_t c = 0; c < cols; ++c) m[j][c] = checked::add(m[j][c], checked::mul(k, m[i][c]));
    for (std::size_t c = 0; c < rows; ++c) L[j][c] = checked::add(L[j][c], checked::mul(k, L[i][c]));
    for (std::size_t r = 0; r < rows; ++r) Linv[r][i] = checked::sub(Linv[r][i], checked::mul(k, Linv[r][j]));
  };
  // col_j += k col_i
  auto col_add = [&](std::size_t j, std::size_t i, Int k) {
    if (k == 0) return;
    for (std::size_t r = 0; r < rows; ++r) m[r][j] = checked::add(m[r][j], checked::mul(k, m[r][i]));
    for (std::size_t r = 0; r < cols; ++r) R[r][j] = checked::add(R[r][j], checked::mul(k, R[r][i]));
    for (std::size_t c = 0; c < cols; ++c) Rinv[i][c] = checked::sub(Rinv[i][c], checked::mul(k, Rinv[j][c]));
  };
  auto row_swap = [&](std::size_t a, std::size_t b) {
    if (a == b) return;
    std::swap(m[a], m[b]);
    std::swap(L[a], L[b]);
    for (auto& r : Linv) std::swap(r[a], r[b]);
  };
  auto col_swap = [&](std::size_t a, std::size_t b) {
    if (a == b) return;
    for (auto& r : m) std::swap(r[a], r[b]);
    for (auto& r : R) std::swap(r[a], r[b]);
    std::swap(Rinv[a], Rinv[b]);
  };
  auto row_negate = [&](std::size_t a) {
    for (auto& x : m[a]) x = -x;
    for (auto& x : L[a]) x = -x;
    for (auto& r : Linv) r[a] = -r[a];
  };

  const std::size_t diag = std::min(rows, cols);
  for (std::size_t t = 0; t < diag; ++t) {
    for (;;) {
      // Smallest nonzero entry of the trailing block becomes the pivot.
      std::optional<std::pair<std::size_t, std::size_t>> piv;
      for (std::size_t i = t; i < rows; ++i)
        for (std::size_t j = t; j < cols; ++j)
          if (m[i][j] != 0 && (!piv || std::abs(m[i][j]) < std::abs(m[piv->first][piv->second])))
            piv = std::make_pair(i, j);
      if (!piv) break;
      row_swap(t, piv->first);
      col_swap(t, piv->second);
      bool clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        row_add(i, t, -checked::fdiv(m[i][t], m[t][t]));
        if (m[i][t] != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        col_add(j, t, -checked::fdiv(m[t][j], m[t][t]));
        if (m[t][j] != 0) clean = false;
      }
      if (!clean) continue;
      // Enforce divisibility against the rest of the block.
      std::optional<std::size_t> bad;
      for (std::size_t i = t + 1; i < rows && !bad; ++i)
        for (std::size_t j = t + 1; j < cols; ++j)
          if (m[i][j] % m[t][t] != 0) {
            bad = i;
            break;
          }
      if (!bad) break;
      row_add(t, *bad, 1);
    }
    if (t < rows && m[t][t] < 0) row_negate(t);
  }

  SmithForm out;
  out.D = m;
  out.U_inv = L;
  out.U = Linv;
  out.V_inv = R;
  out.V = Rinv;
  for (std::size_t t = 0; t < diag; ++t)
    if (m[t][t] != 0) out.invariants.push_back(m[t][t]);
  return out;
}

// ---------------------------------------------------------------------------
// Hermite normal form (row style): echelon, positive pivots, entries above a
// pivot reduced into [0, pivot). Zero rows are dropped.

inline IntMatrix hermite_normal_form(IntMatrix m) {
  const std::size_t cols = cols_of(m);
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
    for (;;) {
      std::optional<std::size_t> piv;
      for (std::size_t i = r; i < m.size(); ++i)
        if (m[i][c] != 0 && (!piv || std::abs(m[i][c]) < std::abs(m[*piv][c]))) piv = i;
      if (!piv) break;
      std::swap(m[r], m[*piv]);
      bool done = true;
      for (std::size_t i = r + 1; i < m.size(); ++i) {
        Int q = checked::fdiv(m[i][c], m[r][c]);
        for (std::size_t k = 0; k < cols; ++k) m[i][k] = checked::sub(m[i][k], checked::mul(q, m[r][k]));
        if (m[i][c] != 0) done = false;
      }
      if (done) break;
    }
    if (r >= m.size() || m[r][c] == 0) continue;
    if (m[r][c] < 0)
      for (auto& x : m[r]) x = -x;
    for (std::size_t i = 0; i < r; ++i) {
      Int q = checked::fdiv(m[i][c], m[r][c]);
      for (std::size_t k = 0; k < cols; ++k) m[i][k] = checked::sub(m[i][k], checked::mul(q, m[r][k]));
    }
    ++r;
  }
  m.resize(r);
  return m;
}

inline std::size_t matrix_rank(const IntMatrix& m) { return hermite_normal_form(m).size(); }

// ---------------------------------------------------------------------------
// Lattices.

struct IntLattice {
  std::size_t dimension = 0;  // ambient Z^dimension
  IntMatrix basis;            // rows

  IntLattice() = default;
  IntLattice(std::size_t n, IntMatrix rows) : dimension(n), basis(std::move(rows)) {
    for (const auto& r : basis)
      if (r.size() != n) throw InputError("basis row has the wrong length");
    if (matrix_rank(basis) != basis.size()) throw InputError("basis rows are linearly dependent");
  }
  static IntLattice full(std::size_t n) { return IntLattice(n, identity_matrix(n)); }
  static IntLattice scaled(std::size_t n, Int m) {
    IntMatrix b = identity_matrix(n);
    for (std::size_t i = 0; i < n; ++i) b[i][i] = m;
    return IntLattice(n, b);
  }
  std::size_t rank() const { return basis.size(); }
  IntMatrix hnf() const { return hermite_normal_form(basis); }
  friend bool operator==(const IntLattice& a, const IntLattice& b) {
    return a.dimension == b.dimension && a.hnf() == b.hnf();
  }
};

inline bool contains_vector(const IntLattice& l, const IntVector& v) {
  IntMatrix stacked = l.basis;
  stacked.push_back(v);
  return hermite_normal_form(stacked) == l.hnf();
}

inline bool contains_lattice(const IntLattice& big, const IntLattice& small) {
  IntMatrix stacked = big.basis;
  stacked.insert(stacked.end(), small.basis.begin(), small.basis.end());
  return hermite_normal_form(stacked) == big.hnf();
}

/// Smallest direct summand of Z^n containing `sub`.
inline IntLattice saturation(const IntLattice& sub) {
  if (sub.rank() == 0) return sub;
  SmithForm s = smith_normal_form(sub.basis);
  IntMatrix rows(s.V.begin(), s.V.begin() + static_cast<std::ptrdiff_t>(sub.rank()));
  return IntLattice(sub.dimension, hermite_normal_form(rows));
}

inline bool is_saturated(const IntLattice& sub) { return saturation(sub) == sub; }

inline Int product_of(const std::vector<Int>& xs) {
  Int p = 1;
  for (Int x : xs) p = checked::mul(p, x);
  return p;
}

struct SublatticePair {
  IntLattice ambient;  // Â
  IntLattice sub;      // Ā

  void validate() const {
    if (ambient.dimension != sub.dimension) throw InputError("lattices live in different Z^n");
    if (ambient.rank() != ambient.dimension) throw InputError("ambient lattice must have full rank");
    if (sub.rank() != ambient.rank()) throw InputError("sublattice must have finite index");
    if (!contains_lattice(ambient, sub)) throw InputError("sublattice is not contained in the ambient");
  }
  std::size_t rank() const { return ambient.rank(); }
};

/// [big : small] for lattices of equal rank with small ⊆ big.
inline Int lattice_index(const IntLattice& big, const IntLattice& small) {
  if (big.rank() != small.rank() || small.rank() == 0)
    throw InputError("index needs two lattices of the same positive rank");
  if (!contains_lattice(big, small)) throw InputError("not a sublattice");
  return product_of(smith_normal_form(small.basis).invariants) /
         product_of(smith_normal_form(big.basis).invariants);
}

inline Int index(const SublatticePair& p) {
  p.validate();
  return lattice_index(p.ambient, p.sub);
}

/// Integer coordinates of `v` in the basis of `l` (which must contain it).
inline IntVector coordinates(const IntLattice& l, const IntVector& v) {
  // v = y·B  ⇔  v·V_inv = y·U·D  with B = U D V.
  SmithForm s = smith_normal_form(l.basis);
  IntVector w = vecmat(v, s.V_inv);
  IntVector z(l.rank(), 0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    Int d = i < l.rank() ? s.D[i][i] : 0;
    if (d == 0) {
      if (w[i] != 0) throw InputError("vector not in lattice span");
      continue;
    }
    if (w[i] % d != 0) throw InputError("vector not in lattice");
    z[i] = w[i] / d;
  }
  return vecmat(z, s.U_inv);
}

/// Basis of Ā in Â-coordinates.
inline IntMatrix relative_coordinates(const SublatticePair& p) {
  IntMatrix out;
  for (const auto& r : p.sub.basis) out.push_back(coordinates(p.ambient, r));
  return out;
}

/// Deterministic complement of a direct summand of Z^n.
inline IntLattice complement_summand(const IntLattice& sub) {
  if (!is_saturated(sub)) throw InputError("complement needs a direct summand");
  const std::size_t n = sub.dimension;
  if (sub.rank() == n) return IntLattice(n, {});
  IntMatrix h = sub.hnf();
  // Coordinate complement when the pivots allow it.
  std::vector<bool> pivot(n, false);
  for (const auto& row : h)
    for (std::size_t c = 0; c < n; ++c)
      if (row[c] != 0) {
        pivot[c] = true;
        break;
      }
  IntMatrix coord;
  for (std::size_t c = 0; c < n; ++c)
    if (!pivot[c]) {
      IntVector e(n, 0);
      e[c] = 1;
      coord.push_back(e);
    }
  IntMatrix stacked = h;
  stacked.insert(stacked.end(), coord.begin(), coord.end());
  if (std::abs(determinant(stacked)) == 1) return IntLattice(n, coord);
  SmithForm s = smith_normal_form(sub.basis);
  IntMatrix rest(s.V.begin() + static_cast<std::ptrdiff_t>(sub.rank()), s.V.end());
  return IntLattice(n, hermite_normal_form(rest));
}

// ---------------------------------------------------------------------------
// Elementary automorphisms.

struct ElementaryGen {
  IntVector multiplier;   // c ∈ C
  IntLattice summand;     // C, corank one
  IntVector complement;   // x with ⟨x⟩ ⊕ C = Z^n
};

inline IntMatrix unimodular_inverse(const IntMatrix& m) {
  SmithForm s = smith_normal_form(m);
  // m = U D V with D = diag(±1) → m^{-1} = V_inv D U_inv.
  for (std::size_t i = 0; i < m.size(); ++i)
    if (std::abs(s.D[i][i]) != 1) throw InputError("matrix is not unimodular");
  return matmul(matmul(s.V_inv, s.D), s.U_inv);
}

/// Matrix fixing C pointwise with x ↦ x + c, acting on row vectors.
inline IntMatrix elementary_matrix(const ElementaryGen& gen) {
  const std::size_t n = gen.summand.dimension;
  if (gen.summand.rank() + 1 != n) throw InputError("summand must have corank one");
  if (gen.complement.size() != n || gen.multiplier.size() != n) throw InputError("vector length mismatch");
  if (!contains_vector(gen.summand, gen.multiplier)) throw InputError("multiplier must lie in the summand");
  IntMatrix b{gen.complement};
  b.insert(b.end(), gen.summand.basis.begin(), gen.summand.basis.end());
  if (std::abs(determinant(b)) != 1) throw InputError("x and C do not form a basis");
  // In the basis (x, C): first row gets the coordinates of c.
  IntMatrix t = identity_matrix(n);
  IntVector cc = coordinates(IntLattice(n, b), gen.multiplier);
  for (std::size_t j = 0; j < n; ++j) t[0][j] = checked::add(t[0][j], cc[j]);
  return matmul(matmul(unimodular_inverse(b), t), b);
}

// ---------------------------------------------------------------------------
// SL_2(Z) and SL_n(Z) presentations.

namespace sl2 {
// s = [[0,-1],[1,0]], t = [[1,1],[0,1]]; letters ±1 = s^{±1}, ±2 = t^{±1}.
inline IntMatrix S() { return {{0, -1}, {1, 0}}; }
inline IntMatrix T() { return {{1, 1}, {0, 1}}; }

inline Presentation presentation() {
  GroupWord st6, s2st3;
  for (int i = 0; i < 6; ++i) {
    st6.push_back(1);
    st6.push_back(2);
  }
  s2st3 = {1, 1};
  for (int i = 0; i < 3; ++i) {
    s2st3.push_back(-2);
    s2st3.push_back(-1);
  }
  return {2, {{1, 1, 1, 1}, st6, s2st3}};
}

inline IntMatrix evaluate(const GroupWord& w) {
  IntMatrix m = identity_matrix(2);
  const IntMatrix s = S(), t = T(), si = unimodular_inverse(S()), ti = unimodular_inverse(T());
  for (int l : w) m = matmul(m, l == 1 ? s : l == -1 ? si : l == 2 ? t : ti);
  return m;
}

/// A word in s, t evaluating to `m` (by the Euclidean algorithm).
inline GroupWord word_for(const IntMatrix& target) {
  if (target.size() != 2 || determinant(target) != 1) throw InputError("not an SL_2(Z) matrix");
  IntMatrix m = target;
  GroupWord ops;  // applied on the left, in order
  auto left = [&](const GroupWord& w) {
    m = matmul(evaluate(w), m);
    ops.insert(ops.begin(), w.begin(), w.end());
  };
  while (m[1][0] != 0) {
    Int k = checked::fdiv(m[0][0], m[1][0]);
    if (k != 0) left(GroupWord(static_cast<std::size_t>(std::abs(k)), k > 0 ? -2 : 2));
    left({1});
  }
  // m = ±[[1,b],[0,1]]
  GroupWord tail;
  if (m[0][0] < 0) {
    tail = {1, 1};
    m = matmul(evaluate({1, 1}), m);
  }
  Int b = m[0][1];
  GroupWord tb(static_cast<std::size_t>(std::abs(b)), b > 0 ? 2 : -2);
  // target = ops^{-1} · tail^{-1} · t^b, and s^2 is central of order 2.
  GroupWord out;
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) out.push_back(-*it);
  out.insert(out.end(), tail.begin(), tail.end());
  out.insert(out.end(), tb.begin(), tb.end());
  GroupWord reduced;
  for (int l : out) {
    if (!reduced.empty() && reduced.back() == -l)
      reduced.pop_back();
    else
      reduced.push_back(l);
  }
  out = std::move(reduced);
  if (evaluate(out) != target) throw ContractError("word decomposition failed");
  return out;
}
}  // namespace sl2

/// Steinberg-type presentation of SL_n(Z), n ≥ 3; generator (i,j) is e_ij.
struct ElementaryPresentation {
  Presentation pres;
  std::vector<std::pair<std::size_t, std::size_t>> gens;
  int letter(std::size_t i, std::size_t j) const {
    for (std::size_t k = 0; k < gens.size(); ++k)
      if (gens[k] == std::make_pair(i, j)) return static_cast<int>(k) + 1;
    throw ContractError("no such elementary generator");
  }
};

inline ElementaryPresentation steinberg_presentation(std::size_t n) {
  if (n < 3) throw InputError("Steinberg presentation needs n ≥ 3");
  ElementaryPresentation ep;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) ep.gens.emplace_back(i, j);
  ep.pres.generators = static_cast<int>(ep.gens.size());
  auto& rels = ep.pres.relators;
  for (auto [i, j] : ep.gens)
    for (auto [k, l] : ep.gens) {
      int a = ep.letter(i, j), b = ep.letter(k, l);
      if (a >= b) continue;
      if (j != k && i != l) rels.push_back({a, b, -a, -b});
    }
  for (auto [i, j] : ep.gens)
    for (std::size_t k = 0; k < n; ++k)
      if (k != i && k != j) {
        int a = ep.letter(i, j), b = ep.letter(j, k), c = ep.letter(i, k);
        rels.push_back({a, b, -a, -b, -c});
      }
  int e12 = ep.letter(0, 1), e21 = ep.letter(1, 0);
  GroupWord w{e12, -e21, e12};
  GroupWord w4;
  for (int r = 0; r < 4; ++r) w4.insert(w4.end(), w.begin(), w.end());
  rels.push_back(w4);
  return ep;
}

// ---------------------------------------------------------------------------
// Index verdicts.

struct IndexVerdict {
  enum class Kind { Finite, ExceededCap, InfiniteByCriterion } kind = Kind::Finite;
  std::uint64_t index = 0;
  std::uint64_t cosets_explored = 0;
  std::string reason;
};

inline const char* to_string(IndexVerdict::Kind k) {
  switch (k) {
    case IndexVerdict::Kind::Finite: return "Finite";
    case IndexVerdict::Kind::ExceededCap: return "ExceededCap";
    case IndexVerdict::Kind::InfiniteByCriterion: return "InfiniteByCriterion";
  }
  return "?";
}

inline nlohmann::json verdict_to_json(const IndexVerdict& v) {
  nlohmann::json j{{"kind", to_string(v.kind)}};
  if (v.kind == IndexVerdict::Kind::Finite) j["index"] = v.index;
  if (v.cosets_explored) j["cosets_explored"] = v.cosets_explored;
  if (!v.reason.empty()) j["reason"] = v.reason;
  return j;
}

inline constexpr Int kMaxEnumeratedPower = 1000;

/// Index in SL_n(Z) of the normal closure of the m-th powers of elementary matrices.
inline IndexVerdict elem_index_power_case(std::size_t n, Int m, std::size_t cap) {
  if (cap == 0) throw InputError("coset cap must be positive");
  if (n < 2) throw InputError("rank must be at least 2");
  if (m < 1) throw InputError("power must be at least 1");
  if (m == 1) return {IndexVerdict::Kind::Finite, 1, 0, ""};
  // Infinite index is already known; enumeration could only exhaust the cap.
  if (n == 2 && m >= 6) return {IndexVerdict::Kind::InfiniteByCriterion, 0, 0, "m >= 6"};
  // Relators this long make enumeration pointless; only the criteria apply.
  if (m > kMaxEnumeratedPower)
    return {IndexVerdict::Kind::ExceededCap, 0, 0, "finite index guaranteed for rank >= 3"};
  Presentation p;
  if (n == 2) {
    p = sl2::presentation();
    p.relators.push_back(GroupWord(static_cast<std::size_t>(m), 2));
  } else {
    auto ep = steinberg_presentation(n);
    p = ep.pres;
    for (int g = 1; g <= p.generators; ++g) p.relators.push_back(GroupWord(static_cast<std::size_t>(m), g));
  }
  EnumerationResult r = enumerate_cosets(p, {}, cap);
  if (r.complete) return {IndexVerdict::Kind::Finite, r.index, r.cosets_defined, ""};
  if (n >= 3)
    return {IndexVerdict::Kind::ExceededCap, 0, r.cosets_defined, "finite index guaranteed for rank >= 3"};
  return {IndexVerdict::Kind::ExceededCap, 0, r.cosets_defined, "coset cap exhausted"};
}

/// Index of the subgroup of SL_2(Z) generated by the given matrices.
inline IndexVerdict sl2_subgroup_index(const std::vector<IntMatrix>& gens, std::size_t cap) {
  std::vector<GroupWord> words;
  for (const auto& g : gens) words.push_back(sl2::word_for(g));
  EnumerationResult r = enumerate_cosets(sl2::presentation(), words, cap);
  if (r.complete) return {IndexVerdict::Kind::Finite, r.index, r.cosets_defined, ""};
  return {IndexVerdict::Kind::ExceededCap, 0, r.cosets_defined, "coset cap exhausted"};
}

/// Regular action of SL_2(Z/3) under right multiplication by s and t.
inline CosetTable sl2_mod3_action() {
  std::vector<IntMatrix> elems;
  for (Int a = 0; a < 3; ++a)
    for (Int b = 0; b < 3; ++b)
      for (Int c = 0; c < 3; ++c)
        for (Int d = 0; d < 3; ++d)
          if (((a * d - b * c) % 3 + 3) % 3 == 1) elems.push_back({{a, b}, {c, d}});
  // Identity first so coset 0 is the trivial coset.
  auto id = std::find(elems.begin(), elems.end(), identity_matrix(2));
  std::iter_swap(elems.begin(), id);
  auto mod3 = [](IntMatrix m) {
    for (auto& r : m)
      for (auto& x : r) x = ((x % 3) + 3) % 3;
    return m;
  };
  auto find = [&](const IntMatrix& m) {
    return static_cast<std::int32_t>(std::find(elems.begin(), elems.end(), mod3(m)) - elems.begin());
  };
  const IntMatrix gens[4] = {sl2::S(), unimodular_inverse(sl2::S()), sl2::T(), unimodular_inverse(sl2::T())};
  CosetTable t;
  t.generators = 2;
  for (const auto& e : elems) {
    std::vector<std::int32_t> row;
    for (const auto& g : gens) row.push_back(find(matmul(e, g)));
    t.rows.push_back(row);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Danger groups and poison verdicts.

struct DangerGenerator {
  ElementaryGen gen;
  IntMatrix matrix;
};

/// τ_{c,C} with C spanned by all but one Â-basis vector and c running over a
/// basis of Ā ∩ C.
inline std::vector<DangerGenerator> danger_group(const SublatticePair& p) {
  p.validate();
  const std::size_t n = p.rank();
  IntMatrix rel = relative_coordinates(p);  // rows: Ā basis in Â coordinates
  std::vector<DangerGenerator> out;
  for (std::size_t i = 0; i < n; ++i) {
    // Left kernel of column i of `rel`: combinations of Ā vanishing on b_i.
    IntMatrix col;
    for (const auto& r : rel) col.push_back({r[i]});
    SmithForm s = smith_normal_form(col);
    IntMatrix summand_rows;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) summand_rows.push_back(p.ambient.basis[j]);
    IntLattice summand(p.ambient.dimension, summand_rows);
    for (std::size_t k = 1; k < n; ++k) {
      IntVector combo = s.U_inv[k];  // coefficients on Ā rows
      IntVector vec(p.ambient.dimension, 0);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t d = 0; d < vec.size(); ++d)
          vec[d] = checked::add(vec[d], checked::mul(combo[r], p.sub.basis[r][d]));
      ElementaryGen g{vec, summand, p.ambient.basis[i]};
      out.push_back({g, elementary_matrix(g)});
    }
  }
  return out;
}

enum class PoisonVerdict { Poison, NotPoison, Unknown };

inline const char* to_string(PoisonVerdict v) {
  switch (v) {
    case PoisonVerdict::Poison: return "Poison";
    case PoisonVerdict::NotPoison: return "NotPoison";
    case PoisonVerdict::Unknown: return "Unknown";
  }
  return "?";
}

struct PoisonReport {
  PoisonVerdict verdict = PoisonVerdict::Unknown;
  std::string reason;
  std::vector<Int> invariants;  // of Â/Ā
  std::optional<IndexVerdict> enumeration;
};

inline PoisonReport poison_verdict(const SublatticePair& p, std::size_t cap = kDefaultCosetCap,
                                   Int sample_bound = 2) {
  p.validate();
  PoisonReport rep;
  IntMatrix rel = relative_coordinates(p);
  rep.invariants = smith_normal_form(rel).invariants;
  if (std::all_of(rep.invariants.begin(), rep.invariants.end(), [](Int d) { return d == 1; })) {
    rep.verdict = PoisonVerdict::NotPoison;
    rep.reason = "sublattice equals the ambient lattice";
    return rep;
  }
  if (p.rank() != 2) {
    rep.verdict = PoisonVerdict::NotPoison;
    rep.reason = "rank is not 2: elementary subgroups have finite index";
    return rep;
  }
  const Int d1 = rep.invariants[0], d2 = rep.invariants[1];
  if (d1 == d2) {
    rep.verdict = d1 >= 6 ? PoisonVerdict::Poison : PoisonVerdict::NotPoison;
    rep.reason = d1 >= 6 ? "scalar sublattice with m >= 6" : "scalar sublattice with m <= 5";
    return rep;
  }
  if (d2 <= 5) {
    rep.verdict = PoisonVerdict::NotPoison;
    rep.reason = "quotient exponent at most 5";
    return rep;
  }
  // Sampled transvections along primitive directions, in Â coordinates.
  IntLattice sub_coords(2, rel);
  std::vector<IntMatrix> gens;
  for (Int a = -sample_bound; a <= sample_bound; ++a)
    for (Int b = 0; b <= sample_bound; ++b) {
      if (b == 0 && a <= 0) continue;
      if (std::gcd(a, b) != 1) continue;
      IntVector dir{a, b};
      Int k = 1;
      while (!contains_vector(sub_coords, {k * a, k * b})) ++k;
      // x completes dir to a basis: solve a·y - b·x = 1.
      IntLattice line(2, {dir});
      IntLattice comp = complement_summand(line);
      ElementaryGen g{{k * a, k * b}, line, comp.basis.front()};
      gens.push_back(elementary_matrix(g));
    }
  rep.enumeration = sl2_subgroup_index(gens, cap);
  if (rep.enumeration->kind == IndexVerdict::Kind::Finite) {
    rep.verdict = PoisonVerdict::NotPoison;
    rep.reason = "sampled danger subgroup has finite index";
  } else {
    rep.verdict = PoisonVerdict::Unknown;
    rep.reason = "coset enumeration of sampled danger subgroup did not terminate";
  }
  return rep;
}

/// Abelianised data of the poisonous-centre construction: Â = Z² and Ā = mÂ.
inline std::pair<SublatticePair, PoisonReport> poisonous_centre_pipeline(Int m) {
  if (m < 2) throw InputError("m must be at least 2");
  SublatticePair p{IntLattice::full(2), IntLattice::scaled(2, m)};
  return {p, poison_verdict(p)};
}

// ---------------------------------------------------------------------------
// Wire format.

inline IntMatrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw InputError("matrix must be an array of rows");
  IntMatrix m;
  for (const auto& r : j) {
    if (!r.is_array()) throw InputError("matrix rows must be arrays");
    IntVector row;
    for (const auto& x : r) {
      if (!x.is_number_integer()) throw InputError("matrix entries must be integers");
      row.push_back(x.get<Int>());
    }
    m.push_back(row);
  }
  return m;
}

inline IntLattice lattice_from_json(const nlohmann::json& j, std::optional<std::size_t> dim = {}) {
  IntMatrix rows = matrix_from_json(j);
  std::size_t n = dim ? *dim : cols_of(rows);
  return IntLattice(n, rows);
}

}  // namespace twistbench
