#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "ntruknap/errors.hpp"
#include "ntruknap/lattice_embed.hpp"
#include "ntruknap/reduction.hpp"
#include "ntruknap/snf.hpp"
#include "oracles.hpp"

using namespace ntruknap;
using namespace std::chrono_literals;

namespace {

std::vector<std::vector<long>> random_entries(Rng& rng, std::size_t n, long bound) {
  std::vector<std::vector<long>> rows(n, std::vector<long>(n));
  for (auto& r : rows)
    for (auto& v : r) v = static_cast<long>(rng.uniform(static_cast<std::uint64_t>(2 * bound + 1))) - bound;
  return rows;
}

IntMatrix random_basis(Rng& rng, std::size_t n, long bound) {
  for (;;) {
    IntMatrix b = IntMatrix::from_int64(random_entries(rng, n, bound));
    if (sgn(determinant(b)) != 0) return b;
  }
}

std::vector<std::vector<long>> to_long(const IntMatrix& m) {
  std::vector<std::vector<long>> out(m.rows(), std::vector<long>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j).get_si();
  return out;
}

std::string cli() { return NTRUKNAP_CLI; }

}  // namespace

TEST(Lll, IdentityStaysIdentity) {
  IntMatrix id = IntMatrix::identity(5);
  EXPECT_EQ(lll_reduce(id), id);
  EXPECT_TRUE(check_reduced(id));
}

TEST(Lll, FindsUnitVectorInSmallExample) {
  IntMatrix b = IntMatrix::from_int64({{1, 1}, {1, 0}});
  IntMatrix r = lll_reduce(b);
  EXPECT_EQ(oracle::shortest_squared(to_long(b)), 1);
  EXPECT_EQ(squared_norm(r.row(0)), 1);
}

TEST(Lll, RandomBasesAreReducedAndKeepTheLattice) {
  Rng rng(41);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t n = 2 + rng.uniform(5);
    IntMatrix b = random_basis(rng, n, 100);
    IntMatrix r = lll_reduce(b);
    EXPECT_TRUE(check_reduced(r));
    EXPECT_EQ(abs(determinant(r)), abs(determinant(b)));
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_TRUE(is_lattice_point(b, r.row(i)));
      EXPECT_TRUE(is_lattice_point(r, b.row(i)));
    }
    // |b1|^2 <= 2^(n-1) lambda_1^2
    BigInt bound = oracle::shortest_squared(to_long(b)) << static_cast<mp_bitcnt_t>(n - 1);
    EXPECT_LE(squared_norm(r.row(0)), bound);
  }
}

TEST(Lll, ExactAndFloatingPathsBothSatisfyTheConditions) {
  Rng rng(42);
  for (int rep = 0; rep < 10; ++rep) {
    IntMatrix b = random_basis(rng, 8, 1000000);
    EXPECT_TRUE(check_reduced(lll_reduce_exact(b)));
    EXPECT_TRUE(check_reduced(lll_reduce(b, Rational(99, 100)), Rational(99, 100)));
  }
}

TEST(Lll, HugeEntries) {
  // entries well past the range of a long double mantissa
  Rng rng(43);
  IntMatrix b = random_basis(rng, 6, 50);
  BigInt big = BigInt(1) << 300;
  for (std::size_t j = 0; j < 6; ++j) b(0, j) *= big;
  IntMatrix r = lll_reduce(b);
  EXPECT_TRUE(check_reduced(r));
  EXPECT_EQ(abs(determinant(r)), abs(determinant(b)));
}

TEST(Lll, ReducingTwiceStaysReduced) {
  Rng rng(44);
  IntMatrix r = lll_reduce(random_basis(rng, 6, 100));
  EXPECT_TRUE(check_reduced(lll_reduce(r)));
}

TEST(Lll, RejectsDependentRowsAndBadDelta) {
  IntMatrix dep = IntMatrix::from_int64({{1, 2, 3}, {2, 4, 6}, {0, 0, 1}});
  EXPECT_THROW(lll_reduce(dep), ReductionError);
  EXPECT_THROW(lll_reduce_exact(dep), ReductionError);
  EXPECT_THROW(lll_reduce(IntMatrix::identity(2), Rational(1, 4)), ParameterError);
  EXPECT_THROW(lll_reduce(IntMatrix::identity(2), Rational(11, 10)), ParameterError);
}

TEST(CheckReduced, DetectsViolations) {
  EXPECT_FALSE(check_reduced(IntMatrix::from_int64({{1, 0}, {10, 1}})));
  // size-reduced but fails the exchange condition
  EXPECT_FALSE(check_reduced(IntMatrix::from_int64({{10, 0}, {0, 1}})));
  EXPECT_TRUE(check_reduced(IntMatrix::from_int64({{1, 0}, {0, 10}})));
  EXPECT_FALSE(check_reduced(IntMatrix::from_int64({{1, 1}, {2, 2}})));
}

TEST(BasisProfile, DiagonalAndIdentity) {
  BasisProfile p = basis_profile(IntMatrix::from_int64({{4, 0, 0}, {0, 2, 0}, {0, 0, 1}}));
  ASSERT_EQ(p.log_norms.size(), 3u);
  EXPECT_NEAR(p.log_norms[0], std::log(4.0), 1e-12);
  EXPECT_NEAR(p.log_norms[1], std::log(2.0), 1e-12);
  EXPECT_NEAR(p.log_norms[2], 0.0, 1e-12);
  EXPECT_NEAR(p.drop, std::log(4.0), 1e-12);
  EXPECT_EQ(p.squared_norms[0], 16);
  EXPECT_EQ(basis_profile(IntMatrix::identity(4)).drop, 0.0);
  EXPECT_THROW(basis_profile(IntMatrix::from_int64({{1, 1}, {2, 2}})), ReductionError);
}

TEST(BasisProfile, DropAfterReductionIsReportedOnly) {
  Rng rng(45);
  int increased = 0;
  for (int rep = 0; rep < 30; ++rep) {
    IntMatrix b = random_basis(rng, 5, 100);
    double before = basis_profile(b).drop;
    double after = basis_profile(lll_reduce(b)).drop;
    EXPECT_GE(after, 0.0);
    if (after > before + 1e-9) ++increased;
  }
  RecordProperty("drop_increased", increased);
}

TEST(Lll, ReducedVectorsBoundedByIndependentSet) {
  // For a tiny attack lattice, the first N reduced vectors are no longer
  // than 2^(n-1) times the longest of N known independent lattice vectors:
  // (r, N1, 0), (kernel vector, 0, 0) and (q e_j, 0, 0).
  Rng rng(46);
  const std::size_t k = 2;
  const std::size_t n = 5;
  const long q = 97;
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<std::vector<long>> a(k, std::vector<long>(n));
    for (auto& row : a)
      for (auto& v : row) v = static_cast<long>(rng.uniform(q));
    std::vector<int> r(n);
    for (auto& v : r) v = static_cast<int>(rng.uniform(3)) - 1;
    KnapsackSystem sys;
    sys.a = IntMatrix::from_int64(a);
    sys.q = q;
    for (std::size_t i = 0; i < k; ++i) {
      long s = 0;
      for (std::size_t j = 0; j < n; ++j) s += a[i][j] * r[j];
      sys.t.emplace_back(((s % q) + q) % q);
    }
    for (std::size_t j = 0; j < n; ++j) sys.column_map.push_back(static_cast<int>(j));
    if (rank(sys.a) < k) continue;
    ScalingParams scale(BigInt(1), BigInt(1000));
    IntegerBasis b = build_bk(sys, scale);

    BigInt longest = squared_norm(embed_solution(r, scale, k));
    for (const auto& kv : kernel_basis(sys.a)) longest = std::max(longest, squared_norm(kv));
    longest = std::max(longest, BigInt(q * q));
    IntMatrix red = lll_reduce(b.rows);
    BigInt bound = longest << static_cast<mp_bitcnt_t>(b.rows.rows() - 1);
    for (std::size_t j = 0; j < n; ++j) EXPECT_LE(squared_norm(red.row(j)), bound);
  }
}

TEST(InternalReducer, NameAndContract) {
  InternalLllReducer reducer;
  EXPECT_EQ(reducer.name(), "internal");
  Rng rng(47);
  IntMatrix b = random_basis(rng, 4, 50);
  ReductionRun run = reducer.run(b);
  EXPECT_TRUE(check_reduced(run.basis));
  verify_same_lattice(b, run.basis);
}

TEST(ExternalReducer, OwnCliThroughTempFiles) {
  Rng rng(48);
  IntMatrix b = random_basis(rng, 6, 100);
  ReductionRun run = external_reduce(b, cli() + " reduce --in {in} --out {out}", 30s);
  EXPECT_TRUE(check_reduced(run.basis));
  EXPECT_NE(run.log.find("reduce --in"), std::string::npos);
  // quality: within the worst-case factor of the internal result
  BigInt internal = squared_norm(lll_reduce(b).row(0));
  EXPECT_LE(squared_norm(run.basis.row(0)), internal << 6);
}

TEST(ExternalReducer, StdinStdoutPipe) {
  Rng rng(49);
  IntMatrix b = random_basis(rng, 5, 100);
  ReductionRun run = external_reduce(b, cli() + " reduce", 30s);
  EXPECT_TRUE(check_reduced(run.basis));
  // cat hands the basis back untouched
  EXPECT_EQ(external_reduce(b, "cat", 30s).basis, b);
}

TEST(ExternalReducer, CapturesStderrInLog) {
  IntMatrix b = IntMatrix::identity(3);
  ReductionRun run = external_reduce(b, "cat; echo diagnostics >&2", 30s);
  EXPECT_NE(run.log.find("diagnostics"), std::string::npos);
}

TEST(ExternalReducer, MissingExecutable) {
  try {
    external_reduce(IntMatrix::identity(3), "/nonexistent/reducer-binary {in} {out}", 30s);
    FAIL() << "expected ExternalToolError";
  } catch (const ExternalToolError& e) {
    EXPECT_NE(e.captured_output().find("not found"), std::string::npos);
  }
}

TEST(ExternalReducer, Timeout) {
  auto start = std::chrono::steady_clock::now();
  EXPECT_THROW(external_reduce(IntMatrix::identity(2), "sleep 20", 300ms), ExternalToolError);
  EXPECT_LT(std::chrono::steady_clock::now() - start, 10s);
}

TEST(ExternalReducer, NonZeroExitAndGarbage) {
  EXPECT_THROW(external_reduce(IntMatrix::identity(2), "cat >/dev/null; exit 3", 30s), ExternalToolError);
  EXPECT_THROW(external_reduce(IntMatrix::identity(2), "cat >/dev/null; echo hello", 30s), ExternalToolError);
}

TEST(ExternalReducer, WrongLatticeIsAnIntegrityError) {
  IntMatrix b = IntMatrix::from_int64({{1, 0}, {0, 3}});
  EXPECT_THROW(external_reduce(b, "cat >/dev/null; echo '[[1 0][0 2]]'", 30s), IntegrityError);
  EXPECT_THROW(external_reduce(b, "cat >/dev/null; echo '[[1 0 0][0 3 0][0 0 1]]'", 30s), IntegrityError);
  // same determinant, different lattice
  EXPECT_THROW(external_reduce(b, "cat >/dev/null; echo '[[3 0][0 1]]'", 30s), IntegrityError);
  // a different basis of the same lattice passes
  EXPECT_NO_THROW(external_reduce(b, "cat >/dev/null; echo '[[1 3][0 -3]]'", 30s));
}

TEST(VerifySameLattice, LargeDimensionUsesModularDeterminant) {
  const std::size_t n = 210;
  IntMatrix b = IntMatrix::identity(n);
  for (std::size_t i = 0; i < n; ++i) b(i, i) = 1 + static_cast<long>(i % 3);
  IntMatrix c = b;
  for (std::size_t j = 0; j < n; ++j) c(1, j) += 5 * c(0, j);
  EXPECT_NO_THROW(verify_same_lattice(b, c));
  IntMatrix d = b;
  d(5, 5) += 1;
  EXPECT_THROW(verify_same_lattice(b, d), IntegrityError);
}

TEST(MakeReducer, Specs) {
  EXPECT_EQ(make_reducer("internal")->name(), "internal");
  auto ext = make_reducer("external:flatter {in}");
  EXPECT_EQ(ext->name(), "external");
  EXPECT_EQ(ext->description(), "flatter {in}");
  EXPECT_THROW(make_reducer("fplll"), ParameterError);
  EXPECT_THROW(make_reducer("external:"), ParameterError);
}
