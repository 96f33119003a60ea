#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "twistbench/matrix_lab.hpp"

using namespace twistbench;

namespace {

IntMatrix random_matrix(std::size_t r, std::size_t c, Int bound, std::mt19937_64& rng) {
  std::uniform_int_distribution<Int> d(-bound, bound);
  IntMatrix m(r, IntVector(c));
  for (auto& row : m)
    for (auto& x : row) x = d(rng);
  return m;
}

Int gcd_of_entries(const IntMatrix& m) {
  Int g = 0;
  for (const auto& r : m)
    for (Int x : r) g = std::gcd(g, x);
  return g;
}

// Unimodular matrix as a product of random elementary row operations.
IntMatrix random_unimodular(std::size_t n, std::mt19937_64& rng) {
  IntMatrix u = identity_matrix(n);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_int_distribution<Int> k(-2, 2);
  for (int s = 0; s < 6; ++s) {
    std::size_t i = pick(rng), j = pick(rng);
    if (i == j) continue;
    Int f = k(rng);
    for (std::size_t c = 0; c < n; ++c) u[i][c] += f * u[j][c];
  }
  return u;
}

}  // namespace

TEST(Smith, FactorisationAndInvariants) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 300; ++t) {
    std::size_t r = 1 + rng() % 4, c = 1 + rng() % 4;
    auto m = random_matrix(r, c, 6, rng);
    auto s = smith_normal_form(m);
    EXPECT_EQ(matmul(matmul(s.U, s.D), s.V), m);
    EXPECT_EQ(matmul(matmul(s.U_inv, m), s.V_inv), s.D);
    for (std::size_t i = 0; i + 1 < s.invariants.size(); ++i) EXPECT_EQ(s.invariants[i + 1] % s.invariants[i], 0);
    EXPECT_EQ(s.invariants.size(), matrix_rank(m));
    if (!s.invariants.empty()) {
      EXPECT_EQ(s.invariants.front(), gcd_of_entries(m));
    }
    if (r == c && s.invariants.size() == r) {
      EXPECT_EQ(product_of(s.invariants), std::abs(determinant(m)));
    }
  }
}

TEST(Smith, Example) {
  auto s = smith_normal_form({{2, 4, 4}, {-6, 6, 12}, {10, -4, -16}});
  EXPECT_EQ(s.invariants, (std::vector<Int>{2, 6, 12}));
}

TEST(Hermite, ShapeAndInvariance) {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 200; ++t) {
    auto m = random_matrix(3, 3, 5, rng);
    auto h = hermite_normal_form(m);
    std::size_t prev = 0;
    bool first = true;
    for (const auto& row : h) {
      std::size_t p = 0;
      while (row[p] == 0) ++p;
      EXPECT_GT(row[p], 0);
      if (!first) {
        EXPECT_GT(p, prev);
      }
      prev = p;
      first = false;
    }
    // Entries above each pivot are reduced modulo it.
    for (std::size_t i = 0; i < h.size(); ++i) {
      std::size_t p = 0;
      while (h[i][p] == 0) ++p;
      for (std::size_t k = 0; k < i; ++k) {
        EXPECT_GE(h[k][p], 0);
        EXPECT_LT(h[k][p], h[i][p]);
      }
    }
    EXPECT_EQ(hermite_normal_form(matmul(random_unimodular(3, rng), m)), h);
    if (h.size() == 3) {
      EXPECT_EQ(std::abs(determinant(h)), std::abs(determinant(m)));
    }
  }
}

TEST(Lattices, IndexAndSaturation) {
  EXPECT_EQ(lattice_index(IntLattice::full(2), IntLattice::scaled(2, 5)), 25);
  EXPECT_EQ(saturation(IntLattice(2, {{2, 4}})), IntLattice(2, {{1, 2}}));
  EXPECT_TRUE(is_saturated(IntLattice(3, {{1, 2, 3}})));
  EXPECT_FALSE(is_saturated(IntLattice(2, {{2, 0}})));
  EXPECT_THROW(IntLattice(2, {{1, 2}, {2, 4}}), InputError);
  EXPECT_THROW(lattice_index(IntLattice::scaled(2, 2), IntLattice::full(2)), InputError);
  std::mt19937_64 rng(43);
  for (int t = 0; t < 100; ++t) {
    auto m = random_matrix(3, 3, 4, rng);
    if (determinant(m) == 0) continue;
    EXPECT_EQ(lattice_index(IntLattice::full(3), IntLattice(3, m)), std::abs(determinant(m)));
  }
}

TEST(Lattices, CoordinatesAndComplements) {
  IntLattice l(2, {{1, 1}, {0, 3}});
  EXPECT_EQ(vecmat(coordinates(l, {2, 5}), l.basis), (IntVector{2, 5}));
  EXPECT_THROW(coordinates(l, {1, 0}), InputError);
  IntLattice line(3, {{1, 2, 3}});
  auto comp = complement_summand(line);
  IntMatrix b = line.basis;
  b.insert(b.end(), comp.basis.begin(), comp.basis.end());
  EXPECT_EQ(std::abs(determinant(b)), 1);
  EXPECT_THROW(complement_summand(IntLattice(2, {{2, 0}})), InputError);
}

TEST(Elementary, FixesSummandAndShiftsComplement) {
  ElementaryGen g{{0, 3}, IntLattice(2, {{0, 1}}), {1, 0}};
  auto m = elementary_matrix(g);
  EXPECT_EQ(m, (IntMatrix{{1, 3}, {0, 1}}));
  ElementaryGen h{{2, 2, 4}, IntLattice(3, {{1, 1, 0}, {0, 0, 1}}), {0, 1, 0}};
  auto mh = elementary_matrix(h);
  EXPECT_EQ(determinant(mh), 1);
  EXPECT_EQ(vecmat(h.complement, mh), (IntVector{2, 3, 4}));
  for (const auto& row : h.summand.basis) EXPECT_EQ(vecmat(row, mh), row);
  EXPECT_THROW(elementary_matrix({{1, 0}, IntLattice(2, {{0, 1}}), {1, 0}}), InputError);
  EXPECT_THROW(elementary_matrix({{0, 1}, IntLattice(2, {{0, 1}}), {2, 0}}), InputError);
}

TEST(SL2, WordForEvaluates) {
  EXPECT_EQ(sl2::evaluate({1, 1, 1, 1}), identity_matrix(2));
  for (const auto& r : sl2::presentation().relators) EXPECT_EQ(sl2::evaluate(r), identity_matrix(2));
  std::mt19937_64 rng(44);
  std::uniform_int_distribution<int> letter(0, 3);
  const int letters[] = {1, -1, 2, -2};
  for (int t = 0; t < 200; ++t) {
    GroupWord w;
    for (int i = 0; i < 12; ++i) w.push_back(letters[letter(rng)]);
    auto m = sl2::evaluate(w);
    EXPECT_EQ(sl2::evaluate(sl2::word_for(m)), m);
  }
  EXPECT_THROW(sl2::word_for({{2, 0}, {0, 1}}), InputError);
}

TEST(SL2, SubgroupIndices) {
  auto whole = sl2_subgroup_index({sl2::S(), sl2::T()}, 1000);
  EXPECT_EQ(whole.kind, IndexVerdict::Kind::Finite);
  EXPECT_EQ(whole.index, 1u);
  // Γ_0(2) is generated by T and [[1,0],[2,1]] (with -I): index 3.
  auto g0 = sl2_subgroup_index({sl2::T(), {{1, 0}, {2, 1}}, {{-1, 0}, {0, -1}}}, 10000);
  EXPECT_EQ(g0.kind, IndexVerdict::Kind::Finite);
  EXPECT_EQ(g0.index, 3u);
}

TEST(IndexVerdicts, PowerCase) {
  auto m2 = elem_index_power_case(2, 2, 100000);
  EXPECT_EQ(m2.kind, IndexVerdict::Kind::Finite);
  EXPECT_EQ(m2.index, 6u);
  EXPECT_EQ(elem_index_power_case(2, 3, 100000).index, 24u);
  EXPECT_EQ(elem_index_power_case(2, 1, 10).index, 1u);
  EXPECT_EQ(elem_index_power_case(2, 6, 2000).kind, IndexVerdict::Kind::InfiniteByCriterion);
  EXPECT_EQ(elem_index_power_case(2, 5000, 10).kind, IndexVerdict::Kind::InfiniteByCriterion);
  EXPECT_EQ(elem_index_power_case(3, 5000, 10).kind, IndexVerdict::Kind::ExceededCap);
  EXPECT_THROW(elem_index_power_case(1, 2, 10), InputError);
  EXPECT_THROW(elem_index_power_case(2, 0, 10), InputError);
  EXPECT_THROW(elem_index_power_case(2, 2, 0), InputError);
}

TEST(IndexVerdicts, SteinbergPresentationRelatorsHold) {
  auto ep = steinberg_presentation(3);
  EXPECT_EQ(ep.gens.size(), 6u);
  // Mod-2 reduction satisfies every relator: evaluate with explicit matrices.
  auto elem = [](std::size_t i, std::size_t j, int sign) {
    IntMatrix m = identity_matrix(3);
    m[i][j] = sign;
    return m;
  };
  for (const auto& r : ep.pres.relators) {
    IntMatrix m = identity_matrix(3);
    for (int l : r) {
      auto [i, j] = ep.gens[static_cast<std::size_t>(std::abs(l) - 1)];
      m = matmul(m, elem(i, j, l > 0 ? 1 : -1));
    }
    EXPECT_EQ(m, identity_matrix(3));
  }
}

TEST(Poison, ScalarSublattices) {
  for (Int m = 2; m <= 5; ++m) EXPECT_EQ(poisonous_centre_pipeline(m).second.verdict, PoisonVerdict::NotPoison);
  for (Int m = 6; m <= 9; ++m) EXPECT_EQ(poisonous_centre_pipeline(m).second.verdict, PoisonVerdict::Poison);
  EXPECT_THROW(poisonous_centre_pipeline(1), InputError);
}

TEST(Poison, OtherBranches) {
  SublatticePair same{IntLattice::full(2), IntLattice::full(2)};
  EXPECT_EQ(poison_verdict(same).verdict, PoisonVerdict::NotPoison);
  SublatticePair rank3{IntLattice::full(3), IntLattice::scaled(3, 7)};
  EXPECT_EQ(poison_verdict(rank3).verdict, PoisonVerdict::NotPoison);
  SublatticePair small{IntLattice::full(2), IntLattice(2, {{2, 0}, {0, 4}})};
  EXPECT_EQ(poison_verdict(small).verdict, PoisonVerdict::NotPoison);
  SublatticePair bad{IntLattice::scaled(2, 2), IntLattice::full(2)};
  EXPECT_THROW(poison_verdict(bad), InputError);
}

TEST(Poison, DangerGeneratorsFixTheirSummand) {
  SublatticePair p{IntLattice(2, {{1, 1}, {0, 1}}), IntLattice(2, {{3, 3}, {0, 6}})};
  for (const auto& d : danger_group(p)) {
    EXPECT_EQ(determinant(d.matrix), 1);
    EXPECT_TRUE(contains_vector(p.sub, d.gen.multiplier));
    for (const auto& row : d.gen.summand.basis) EXPECT_EQ(vecmat(row, d.matrix), row);
  }
}
