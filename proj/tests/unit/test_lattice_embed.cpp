#include <gtest/gtest.h>

#include "ntruknap/errors.hpp"
#include "ntruknap/lattice_embed.hpp"
#include "oracles.hpp"

using namespace ntruknap;

namespace {

KnapsackSystem random_system(Rng& rng, std::size_t k, std::size_t n, long q) {
  KnapsackSystem sys;
  std::vector<std::vector<long>> a(k, std::vector<long>(n));
  for (auto& row : a)
    for (auto& v : row) v = static_cast<long>(rng.uniform(static_cast<std::uint64_t>(q)));
  sys.a = IntMatrix::from_int64(a);
  for (std::size_t i = 0; i < k; ++i) sys.t.emplace_back(static_cast<long>(rng.uniform(static_cast<std::uint64_t>(q))));
  sys.q = q;
  for (std::size_t j = 0; j < n; ++j) sys.column_map.push_back(static_cast<int>(j));
  return sys;
}

BigInt pow_big(const BigInt& b, unsigned long e) {
  BigInt out;
  mpz_pow_ui(out.get_mpz_t(), b.get_mpz_t(), e);
  return out;
}

}  // namespace

TEST(ScalingParams, Validation) {
  EXPECT_THROW(ScalingParams(BigInt(0), BigInt(5)), ParameterError);
  EXPECT_THROW(ScalingParams(BigInt(5), BigInt(5)), ParameterError);
  EXPECT_NO_THROW(ScalingParams(BigInt(1), BigInt(2)));
}

TEST(CeilPower, ExactValues) {
  EXPECT_EQ(ceil_power(BigInt(2048), "8"), pow_big(BigInt(2048), 8));
  EXPECT_EQ(ceil_power(BigInt(256), "0.5"), BigInt(16));
  EXPECT_EQ(ceil_power(BigInt(2), "0.5"), BigInt(2));    // sqrt 2 = 1.41...
  EXPECT_EQ(ceil_power(BigInt(10), "1.5"), BigInt(32));  // 31.62...
  EXPECT_EQ(ceil_power(BigInt(7), "0"), BigInt(1));
  // 2^165 for the largest published exponent at q = 2048
  EXPECT_EQ(ceil_power(BigInt(2048), "15"), pow_big(BigInt(2), 165));
  EXPECT_THROW(ceil_power(BigInt(2), "abc"), ParameterError);
  auto s = ScalingParams::from_exponent(BigInt(9), BigInt(2048), "8");
  EXPECT_EQ(s.n2, pow_big(BigInt(2), 88));
}

TEST(BuildBk, ShapeAndBlocks) {
  Rng rng(31);
  KnapsackSystem sys = random_system(rng, 2, 3, 7);
  ScalingParams scale(BigInt(2), BigInt(5));
  IntegerBasis b = build_bk(sys, scale);
  ASSERT_EQ(b.rows.rows(), 6u);
  ASSERT_EQ(b.rows.cols(), 6u);
  ASSERT_TRUE(b.layout);
  EXPECT_EQ(b.layout->n_prime, 3u);
  EXPECT_EQ(b.layout->k, 2u);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(b.rows(i, j), i == j ? 1 : 0);
    EXPECT_EQ(b.rows(i, 3), 0);
    for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(b.rows(i, 4 + j), 5 * sys.a(j, i));
  }
  EXPECT_EQ(b.rows(3, 3), 2);
  for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(b.rows(3, 4 + j), -5 * sys.t[j]);
  for (std::size_t j = 0; j < 2; ++j) {
    for (std::size_t c = 0; c < 6; ++c) EXPECT_EQ(b.rows(4 + j, c), c == 4 + j ? 35 : 0);
  }
  EXPECT_EQ(determinant(b.rows), 2450);
  EXPECT_EQ(expected_determinant(*b.layout), 2450);
}

TEST(BuildBk, DeterminantOnRandomSystems) {
  Rng rng(32);
  for (int rep = 0; rep < 20; ++rep) {
    const long q = std::vector<long>{7, 97, 256}[rng.uniform(3)];
    const std::size_t n = 2 + rng.uniform(8);
    const std::size_t k = 1 + rng.uniform(std::min<std::size_t>(n, 5));
    KnapsackSystem sys = random_system(rng, k, n, q);
    ScalingParams scale(BigInt(1 + static_cast<long>(rng.uniform(9))), BigInt(10 + static_cast<long>(rng.uniform(1000))));
    IntegerBasis b = build_bk(sys, scale);
    EXPECT_EQ(determinant(b.rows), scale.n1 * pow_big(scale.n2 * q, k));
  }
}

TEST(BuildBz, MatchesBkWhenNothingIsKnownAndHasReducedSize) {
  Rng rng(33);
  KnapsackSystem sys = random_system(rng, 4, 9, 97);
  ScalingParams scale(BigInt(3), BigInt(1000));
  EXPECT_EQ(build_bz(sys, scale).rows, build_bk(sys, scale).rows);

  KnapsackSystem big = random_system(rng, 50, 61, 256);
  KnapsackSystem z = reduce_system_with_known_r(big, {{0, 1}, {1, 0}, {2, -1}, {3, 1}, {4, 0},
                                                      {5, 0}, {6, 1}, {7, -1}, {8, 0}, {9, 1}});
  IntegerBasis bz = build_bz(z, scale);
  EXPECT_EQ(bz.rows.rows(), 102u);
  EXPECT_EQ(expected_determinant(*bz.layout), 3 * pow_big(BigInt(256000), 50));
}

TEST(EmbedSolution, LayoutAndNorm) {
  ScalingParams scale(BigInt(3), BigInt(100));
  std::vector<int> x(40, 0);
  for (int i = 0; i < 30; ++i) x[static_cast<std::size_t>(i)] = i % 2 ? 1 : -1;
  IntVector v = embed_solution(x, scale, 5);
  ASSERT_EQ(v.size(), 46u);
  EXPECT_EQ(v[40], 3);
  EXPECT_EQ(squared_norm(v), 39);
  IntVector z = embed_solution(std::vector<int>(4, 0), scale, 2);
  EXPECT_EQ(squared_norm(z), 9);
}

TEST(IsLatticePoint, RowsAndNonMembers) {
  Rng rng(34);
  KnapsackSystem sys = random_system(rng, 3, 5, 97);
  IntegerBasis b = build_bk(sys, ScalingParams(BigInt(2), BigInt(50)));
  for (std::size_t i = 0; i < b.rows.rows(); ++i) EXPECT_TRUE(is_lattice_point(b.rows, b.rows.row(i)));
  IntVector unit(b.rows.cols(), BigInt(0));
  unit.back() = 1;
  EXPECT_FALSE(is_lattice_point(b.rows, unit));
  IntVector sum = b.rows.row(0);
  for (std::size_t c = 0; c < sum.size(); ++c) sum[c] += 3 * b.rows(4, c) - b.rows(7, c);
  EXPECT_TRUE(is_lattice_point(b.rows, sum));
  EXPECT_THROW(is_lattice_point(b.rows, IntVector(3, BigInt(0))), ParameterError);
}

TEST(IsLatticePoint, NonTriangularBasis) {
  IntMatrix b = IntMatrix::from_int64({{2, 1}, {1, 3}});
  EXPECT_TRUE(is_lattice_point(b, IntVector{BigInt(3), BigInt(4)}));
  EXPECT_FALSE(is_lattice_point(b, IntVector{BigInt(1), BigInt(0)}));
}

TEST(IsLatticePoint, MembershipIffSolution) {
  Rng rng(35);
  for (int rep = 0; rep < 15; ++rep) {
    const long q = std::vector<long>{7, 97, 256}[rng.uniform(3)];
    const std::size_t n = 2 + rng.uniform(7);
    const std::size_t k = 1 + rng.uniform(3);
    KnapsackSystem sys = random_system(rng, k, n, q);
    ScalingParams scale(BigInt(1 + static_cast<long>(rng.uniform(5))), BigInt(20 + static_cast<long>(rng.uniform(100))));
    IntegerBasis b = build_bk(sys, scale);
    auto sols = brute_force_solve(sys);
    for (const auto& x : sols) EXPECT_TRUE(is_lattice_point(b.rows, embed_solution(x, scale, k)));
    int checked = 0;
    for (int tries = 0; tries < 400 && checked < 30; ++tries) {
      std::vector<int> x(n);
      for (auto& v : x) v = static_cast<int>(rng.uniform(3)) - 1;
      if (std::find(sols.begin(), sols.end(), x) != sols.end()) continue;
      ++checked;
      EXPECT_FALSE(is_lattice_point(b.rows, embed_solution(x, scale, k)));
    }
  }
}

TEST(LatticeStructure, CoordinatesDivisibleByScales) {
  Rng rng(36);
  KnapsackSystem sys = random_system(rng, 3, 6, 97);
  ScalingParams scale(BigInt(4), BigInt(33));
  IntegerBasis b = build_bk(sys, scale);
  for (int rep = 0; rep < 50; ++rep) {
    IntVector v(b.rows.cols(), BigInt(0));
    for (std::size_t i = 0; i < b.rows.rows(); ++i) {
      long c = static_cast<long>(rng.uniform(11)) - 5;
      for (std::size_t j = 0; j < v.size(); ++j) v[j] += c * b.rows(i, j);
    }
    EXPECT_TRUE(mpz_divisible_p(v[6].get_mpz_t(), scale.n1.get_mpz_t()));
    for (std::size_t j = 7; j < v.size(); ++j) EXPECT_TRUE(mpz_divisible_p(v[j].get_mpz_t(), scale.n2.get_mpz_t()));
  }
}

TEST(MatrixText, RoundTripAndTolerance) {
  IntMatrix m = IntMatrix::from_int64({{1, -2, 3}, {40, 5, -6}});
  m(0, 0) = BigInt("123456789012345678901234567890");
  EXPECT_EQ(parse_matrix(format_matrix(m)), m);
  EXPECT_EQ(parse_matrix("[[1 2]\n [3, 4]]"), IntMatrix::from_int64({{1, 2}, {3, 4}}));
  EXPECT_THROW(parse_matrix("[[1 2][3]]"), ParameterError);
  EXPECT_THROW(parse_matrix("[[1 x]]"), ParameterError);
}
