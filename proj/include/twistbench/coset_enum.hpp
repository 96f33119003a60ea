#pragma once

// Hunter–Low–Todd coset enumeration with coincidence processing.
//
// Words are sequences of nonzero integers: +k is generator k-1, -k its
// inverse. Column 2i holds generator i, column 2i+1 its inverse.

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "twistbench/errors.hpp"

namespace twistbench {

using GroupWord = std::vector<int>;

struct Presentation {
  int generators = 0;
  std::vector<GroupWord> relators;
};

inline constexpr std::size_t kDefaultCosetCap = 1'000'000;

/// Cap from TWISTBENCH_COSET_CAP when set to a positive integer, else the default.
inline std::size_t coset_cap_from_env() {
  if (const char* s = std::getenv("TWISTBENCH_COSET_CAP")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(s, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefaultCosetCap;
}

struct CosetTable {
  int generators = 0;
  // rows[c][col], compacted so live cosets are 0..size()-1 and coset 0 is H.
  std::vector<std::vector<std::int32_t>> rows;
  std::size_t size() const { return rows.size(); }

  std::int32_t act(std::int32_t c, int letter) const {
    int col = letter > 0 ? 2 * (letter - 1) : 2 * (-letter - 1) + 1;
    return rows[static_cast<std::size_t>(c)][static_cast<std::size_t>(col)];
  }
  std::int32_t act(std::int32_t c, const GroupWord& w) const {
    for (int l : w) c = act(c, l);
    return c;
  }
};

struct EnumerationResult {
  bool complete = false;
  std::size_t index = 0;            // number of cosets when complete
  std::size_t cosets_defined = 0;   // total ever allocated
  std::optional<CosetTable> table;
};

class CosetEnumerator {
 public:
  CosetEnumerator(const Presentation& p, std::vector<GroupWord> subgroup, std::size_t cap)
      : gens_(p.generators), cols_(2 * p.generators), subgroup_(std::move(subgroup)), cap_(cap) {
    if (cap == 0) throw InputError("coset cap must be positive");
    if (gens_ <= 0) throw InputError("presentation needs a generator");
    for (const auto& r : p.relators) rels_.push_back(to_cols(r));
    for (auto& h : subgroup_) subs_.push_back(to_cols(h));
  }

  EnumerationResult run() {
    EnumerationResult out;
    new_coset();
    try {
      for (const auto& h : subs_) scan_and_fill(0, h);
      for (std::size_t c = 0; c < parent_.size(); ++c) {
        for (const auto& r : rels_) {
          if (!live(c)) break;
          scan_and_fill(static_cast<std::int32_t>(c), r);
        }
        for (int x = 0; x < cols_ && live(c); ++x)
          if (at(static_cast<std::int32_t>(c), x) < 0) define(static_cast<std::int32_t>(c), x);
      }
    } catch (const CapExceeded&) {
      out.cosets_defined = parent_.size();
      return out;
    }
    out.complete = true;
    out.cosets_defined = parent_.size();
    out.index = live_count_;
    out.table = compact();
    return out;
  }

 private:
  struct CapExceeded {};

  std::vector<int> to_cols(const GroupWord& w) const {
    std::vector<int> out;
    for (int l : w) {
      if (l == 0 || std::abs(l) > gens_) throw InputError("word letter out of range");
      out.push_back(l > 0 ? 2 * (l - 1) : 2 * (-l - 1) + 1);
    }
    return out;
  }
  static int inv(int col) { return col ^ 1; }

  std::int32_t& at(std::int32_t c, int col) {
    return table_[static_cast<std::size_t>(c) * static_cast<std::size_t>(cols_) +
                  static_cast<std::size_t>(col)];
  }
  bool live(std::size_t c) const { return parent_[c] == static_cast<std::int32_t>(c); }

  std::int32_t new_coset() {
    if (parent_.size() >= cap_) throw CapExceeded{};
    auto c = static_cast<std::int32_t>(parent_.size());
    parent_.push_back(c);
    table_.insert(table_.end(), static_cast<std::size_t>(cols_), -1);
    ++live_count_;
    return c;
  }

  void define(std::int32_t c, int x) {
    std::int32_t d = new_coset();
    at(c, x) = d;
    at(d, inv(x)) = c;
  }

  std::int32_t rep(std::int32_t k) {
    std::int32_t r = k;
    while (parent_[static_cast<std::size_t>(r)] != r) r = parent_[static_cast<std::size_t>(r)];
    while (parent_[static_cast<std::size_t>(k)] != r) {
      std::int32_t next = parent_[static_cast<std::size_t>(k)];
      parent_[static_cast<std::size_t>(k)] = r;
      k = next;
    }
    return r;
  }

  void merge(std::int32_t k, std::int32_t l, std::vector<std::int32_t>& queue) {
    k = rep(k);
    l = rep(l);
    if (k == l) return;
    if (k > l) std::swap(k, l);
    parent_[static_cast<std::size_t>(l)] = k;
    --live_count_;
    queue.push_back(l);
  }

  void coincidence(std::int32_t a, std::int32_t b) {
    std::vector<std::int32_t> queue;
    merge(a, b, queue);
    for (std::size_t i = 0; i < queue.size(); ++i) {
      std::int32_t g = queue[i];
      for (int x = 0; x < cols_; ++x) {
        std::int32_t d = at(g, x);
        if (d < 0) continue;
        at(d, inv(x)) = -1;
        std::int32_t mu = rep(g), nu = rep(d);
        if (at(mu, x) >= 0)
          merge(nu, at(mu, x), queue);
        else if (at(nu, inv(x)) >= 0)
          merge(mu, at(nu, inv(x)), queue);
        else {
          at(mu, x) = nu;
          at(nu, inv(x)) = mu;
        }
      }
    }
  }

  void scan_and_fill(std::int32_t a, const std::vector<int>& w) {
    if (w.empty()) return;
    std::int32_t f = a, b = a;
    std::ptrdiff_t i = 0, j = static_cast<std::ptrdiff_t>(w.size()) - 1;
    for (;;) {
      while (i <= j && at(f, w[static_cast<std::size_t>(i)]) >= 0) f = at(f, w[static_cast<std::size_t>(i++)]);
      // Both scans met: the forward end must equal the backward end.
      if (i > j) {
        if (f != b) coincidence(f, b);
        return;
      }
      while (j >= i && at(b, inv(w[static_cast<std::size_t>(j)])) >= 0)
        b = at(b, inv(w[static_cast<std::size_t>(j--)]));
      if (j < i) {
        coincidence(f, b);
        return;
      }
      if (i == j) {
        at(f, w[static_cast<std::size_t>(i)]) = b;
        at(b, inv(w[static_cast<std::size_t>(i)])) = f;
        return;
      }
      define(f, w[static_cast<std::size_t>(i)]);
    }
  }

  CosetTable compact() {
    std::vector<std::int32_t> newid(parent_.size(), -1);
    std::int32_t n = 0;
    for (std::size_t c = 0; c < parent_.size(); ++c)
      if (live(c)) newid[c] = n++;
    CosetTable t;
    t.generators = gens_;
    for (std::size_t c = 0; c < parent_.size(); ++c) {
      if (!live(c)) continue;
      std::vector<std::int32_t> row(static_cast<std::size_t>(cols_));
      for (int x = 0; x < cols_; ++x)
        row[static_cast<std::size_t>(x)] = newid[static_cast<std::size_t>(rep(at(static_cast<std::int32_t>(c), x)))];
      t.rows.push_back(std::move(row));
    }
    return t;
  }

  int gens_;
  int cols_;
  std::vector<GroupWord> subgroup_;
  std::size_t cap_;
  std::vector<std::vector<int>> rels_, subs_;
  std::vector<std::int32_t> parent_;
  std::vector<std::int32_t> table_;
  std::size_t live_count_ = 0;
};

inline EnumerationResult enumerate_cosets(const Presentation& p, const std::vector<GroupWord>& subgroup,
                                          std::size_t cap) {
  return CosetEnumerator(p, subgroup, cap).run();
}

/// True iff every relator fixes every coset and every subgroup generator fixes coset 0.
inline bool table_is_consistent(const CosetTable& t, const Presentation& p,
                                const std::vector<GroupWord>& subgroup) {
  for (std::int32_t c = 0; c < static_cast<std::int32_t>(t.size()); ++c)
    for (const auto& r : p.relators)
      if (t.act(c, r) != c) return false;
  for (const auto& h : subgroup)
    if (t.act(0, h) != 0) return false;
  return true;
}

/// Relabels cosets in breadth-first order from coset 0, so equal actions give equal tables.
inline CosetTable canonical_relabel(const CosetTable& t) {
  std::vector<std::int32_t> order, id(t.size(), -1);
  order.push_back(0);
  id[0] = 0;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::int32_t d : t.rows[static_cast<std::size_t>(order[i])])
      if (id[static_cast<std::size_t>(d)] < 0) {
        id[static_cast<std::size_t>(d)] = static_cast<std::int32_t>(order.size());
        order.push_back(d);
      }
  CosetTable out;
  out.generators = t.generators;
  for (std::int32_t c : order) {
    std::vector<std::int32_t> row;
    for (std::int32_t d : t.rows[static_cast<std::size_t>(c)]) row.push_back(id[static_cast<std::size_t>(d)]);
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace twistbench
