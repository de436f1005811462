#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

#include "ntruknap/errors.hpp"
#include "ntruknap/reduction.hpp"

namespace ntruknap {

namespace {

void check_delta(const Rational& delta) {
  if (delta <= Rational(1, 4) || delta > 1) throw ParameterError("LLL: delta must lie in (1/4, 1]");
}

// Integer Gram-Schmidt data: d[i] is the Gram determinant of the first i
// rows (d[0] = 1) and lam[i][j] = d[j+1] * mu_ij for j < i. All entries are
// integers for an integer basis.
struct IntegralGso {
  std::vector<BigInt> d;
  std::vector<std::vector<BigInt>> lam;

  explicit IntegralGso(std::size_t n) : d(n + 1, BigInt(0)), lam(n, std::vector<BigInt>(n, BigInt(0))) {
    d[0] = 1;
  }

  // Fills row k from the basis and rows < k. Returns false if row k is
  // dependent on the earlier rows.
  bool compute_row(const std::vector<IntVector>& b, std::size_t k) {
    BigInt u;
    for (std::size_t j = 0; j <= k; ++j) {
      u = dot(b[k], b[j]);
      for (std::size_t i = 0; i < j; ++i) {
        u *= d[i + 1];
        mpz_submul(u.get_mpz_t(), lam[k][i].get_mpz_t(), lam[j][i].get_mpz_t());
        mpz_divexact(u.get_mpz_t(), u.get_mpz_t(), d[i].get_mpz_t());
      }
      if (j < k) {
        lam[k][j] = u;
      } else {
        d[k + 1] = u;
      }
    }
    return sgn(d[k + 1]) > 0;
  }
};

// round(num / den) for den > 0
BigInt round_div(const BigInt& num, const BigInt& den) {
  BigInt twice = 2 * num + den;
  BigInt out;
  mpz_fdiv_q(out.get_mpz_t(), twice.get_mpz_t(), BigInt(2 * den).get_mpz_t());
  return out;
}

void sub_scaled_row(IntVector& target, const IntVector& source, const BigInt& factor) {
  if (factor.fits_slong_p()) {
    const long f = factor.get_si();
    if (f > 0) {
      for (std::size_t i = 0; i < target.size(); ++i) {
        mpz_submul_ui(target[i].get_mpz_t(), source[i].get_mpz_t(), static_cast<unsigned long>(f));
      }
    } else {
      for (std::size_t i = 0; i < target.size(); ++i) {
        mpz_addmul_ui(target[i].get_mpz_t(), source[i].get_mpz_t(), static_cast<unsigned long>(-(f + 1)) + 1);
      }
    }
    return;
  }
  for (std::size_t i = 0; i < target.size(); ++i) {
    mpz_submul(target[i].get_mpz_t(), source[i].get_mpz_t(), factor.get_mpz_t());
  }
}

void integral_lll(std::vector<IntVector>& b, const Rational& delta) {
  const std::size_t n = b.size();
  if (n == 0) return;
  const BigInt& num = delta.get_num();
  const BigInt& den = delta.get_den();
  IntegralGso gso(n);
  if (!gso.compute_row(b, 0)) throw ReductionError("LLL: basis rows are linearly dependent");
  std::size_t kmax = 0;
  auto& d = gso.d;
  auto& lam = gso.lam;

  auto reduce = [&](std::size_t k, std::size_t l) {
    BigInt twice = 2 * abs(lam[k][l]);
    if (twice <= d[l + 1]) return;
    const BigInt r = round_div(lam[k][l], d[l + 1]);
    sub_scaled_row(b[k], b[l], r);
    mpz_submul(lam[k][l].get_mpz_t(), r.get_mpz_t(), d[l + 1].get_mpz_t());
    for (std::size_t i = 0; i < l; ++i) {
      mpz_submul(lam[k][i].get_mpz_t(), r.get_mpz_t(), lam[l][i].get_mpz_t());
    }
  };

  std::size_t k = 1;
  BigInt lhs, rhs, big_b, t;
  while (k < n) {
    if (k > kmax) {
      kmax = k;
      if (!gso.compute_row(b, k)) throw ReductionError("LLL: basis rows are linearly dependent");
    }
    reduce(k, k - 1);
    const BigInt& lk = lam[k][k - 1];
    lhs = d[k + 1] * d[k - 1] + lk * lk;
    lhs *= den;
    rhs = d[k] * d[k];
    rhs *= num;
    if (lhs < rhs) {
      b[k].swap(b[k - 1]);
      for (std::size_t j = 0; j + 1 < k; ++j) lam[k][j].swap(lam[k - 1][j]);
      const BigInt lambda = lam[k][k - 1];
      big_b = d[k - 1] * d[k + 1] + lambda * lambda;
      mpz_divexact(big_b.get_mpz_t(), big_b.get_mpz_t(), d[k].get_mpz_t());
      for (std::size_t i = k + 1; i <= kmax; ++i) {
        t = lam[i][k];
        BigInt next = d[k + 1] * lam[i][k - 1] - lambda * t;
        mpz_divexact(lam[i][k].get_mpz_t(), next.get_mpz_t(), d[k].get_mpz_t());
        next = big_b * t + lambda * lam[i][k];
        mpz_divexact(lam[i][k - 1].get_mpz_t(), next.get_mpz_t(), d[k + 1].get_mpz_t());
      }
      d[k] = big_b;
      if (k > 1) --k;
    } else {
      for (std::size_t l = k - 1; l-- > 0;) reduce(k, l);
      ++k;
    }
  }
}

// ---- floating-point pass ---------------------------------------------------

using Real = long double;

Real to_real(const BigInt& z) {
  const std::size_t bits = mpz_sizeinbase(z.get_mpz_t(), 2);
  if (bits <= 63) return static_cast<Real>(z.get_si());
  BigInt top;
  const auto shift = static_cast<mp_bitcnt_t>(bits - 63);
  mpz_tdiv_q_2exp(top.get_mpz_t(), z.get_mpz_t(), shift);
  return std::ldexp(static_cast<Real>(top.get_si()), static_cast<int>(shift));
}

// Nearest integer to x as a BigInt.
BigInt round_to_bigint(Real x) {
  const Real r = std::nearbyint(x);
  if (std::fabs(r) < 9.0e18L) return BigInt(static_cast<long>(r));
  int exp = 0;
  const Real mant = std::frexp(r, &exp);  // r = mant * 2^exp, 0.5 <= |mant| < 1
  const auto scaled = static_cast<long>(std::ldexp(mant, 63));
  BigInt out(scaled);
  if (exp > 63) {
    mpz_mul_2exp(out.get_mpz_t(), out.get_mpz_t(), static_cast<mp_bitcnt_t>(exp - 63));
  } else {
    mpz_tdiv_q_2exp(out.get_mpz_t(), out.get_mpz_t(), static_cast<mp_bitcnt_t>(63 - exp));
  }
  return out;
}

// Schnorr-Euchner style LLL with lazy size reduction. The basis and its Gram
// matrix are exact integers; only mu and r are approximated. Returns false if
// it gave up (no convergence or a numerically vanishing vector); the basis is
// still a valid basis of the same lattice either way.
bool fp_lll(std::vector<IntVector>& b, Real delta) {
  const std::size_t n = b.size();
  if (n < 2) return true;
  const Real eta = 0.51L;

  std::vector<IntVector> g(n, IntVector(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      g[i][j] = dot(b[i], b[j]);
      g[j][i] = g[i][j];
    }
  }
  std::vector<std::vector<Real>> r(n, std::vector<Real>(n, 0));
  std::vector<std::vector<Real>> mu(n, std::vector<Real>(n, 0));
  r[0][0] = to_real(g[0][0]);

  // b_k -= x b_j, with the Gram matrix kept exact.
  BigInt tmp;
  auto row_op = [&](std::size_t k, std::size_t j, const BigInt& x) {
    sub_scaled_row(b[k], b[j], x);
    // |b_k - x b_j|^2 = g_kk - 2x g_kj + x^2 g_jj
    tmp = x * g[j][j];
    tmp -= 2 * g[k][j];
    mpz_addmul(g[k][k].get_mpz_t(), x.get_mpz_t(), tmp.get_mpz_t());
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k) continue;
      mpz_submul(g[k][i].get_mpz_t(), x.get_mpz_t(), g[j][i].get_mpz_t());
      g[i][k] = g[k][i];
    }
  };

  auto compute_row = [&](std::size_t k) {
    for (std::size_t j = 0; j < k; ++j) {
      Real acc = to_real(g[k][j]);
      for (std::size_t i = 0; i < j; ++i) acc -= mu[j][i] * r[k][i];
      r[k][j] = acc;
      mu[k][j] = acc / r[j][j];
    }
    Real acc = to_real(g[k][k]);
    for (std::size_t i = 0; i < k; ++i) acc -= mu[k][i] * r[k][i];
    r[k][k] = acc;
  };

  const std::size_t max_iterations = 200000 + 2000 * n * n;
  std::size_t iterations = 0;
  std::size_t k = 1;
  while (k < n) {
    if (++iterations > max_iterations) return false;
    r[0][0] = to_real(g[0][0]);

    bool stable = false;
    for (int pass = 0; pass < 64 && !stable; ++pass) {
      compute_row(k);
      stable = true;
      for (std::size_t j = k; j-- > 0;) {
        if (std::fabs(mu[k][j]) <= eta) continue;
        const Real x = std::nearbyint(mu[k][j]);
        stable = false;
        row_op(k, j, round_to_bigint(x));
        for (std::size_t i = 0; i < j; ++i) mu[k][i] -= x * mu[j][i];
        mu[k][j] -= x;
      }
    }
    if (!stable) return false;
    if (!(r[k][k] > 0)) return false;

    const Real lovasz = r[k][k] + mu[k][k - 1] * mu[k][k - 1] * r[k - 1][k - 1];
    if (lovasz < delta * r[k - 1][k - 1]) {
      b[k].swap(b[k - 1]);
      g[k].swap(g[k - 1]);
      for (auto& row : g) std::swap(row[k], row[k - 1]);
      if (k > 1) --k;
    } else {
      ++k;
    }
  }
  return true;
}

}  // namespace

IntMatrix lll_reduce_exact(const IntMatrix& b, const Rational& delta) {
  check_delta(delta);
  auto rows = b.row_data();
  integral_lll(rows, delta);
  return IntMatrix(std::move(rows));
}

IntMatrix lll_reduce(const IntMatrix& b, const Rational& delta) {
  check_delta(delta);
  auto rows = b.row_data();
  // A slightly stronger target for the approximate pass leaves the exact pass
  // with little to do.
  const Real fp_delta = std::min<Real>(0.999L, static_cast<Real>(delta.get_d()) + 0.01L);
  fp_lll(rows, fp_delta);
  integral_lll(rows, delta);
  return IntMatrix(std::move(rows));
}

bool check_reduced(const IntMatrix& b, const Rational& delta) {
  const auto& rows = b.row_data();
  const std::size_t n = rows.size();
  IntegralGso gso(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!gso.compute_row(rows, k)) return false;
  }
  const auto& d = gso.d;
  const auto& lam = gso.lam;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      // |mu_ij| <= 1/2  <=>  2 |lam_ij| <= d_{j+1}
      if (2 * abs(lam[i][j]) > d[j + 1]) return false;
    }
  }
  for (std::size_t k = 1; k < n; ++k) {
    // |b_k*|^2 >= (delta - mu^2) |b_{k-1}*|^2, multiplied through by d_k^2 / d_{k-1}
    BigInt lhs = (d[k + 1] * d[k - 1] + lam[k][k - 1] * lam[k][k - 1]) * delta.get_den();
    BigInt rhs = d[k] * d[k] * delta.get_num();
    if (lhs < rhs) return false;
  }
  return true;
}

std::vector<Rational> gram_schmidt_squared_norms(const IntMatrix& b) {
  const auto& rows = b.row_data();
  const std::size_t n = rows.size();
  IntegralGso gso(n);
  std::vector<Rational> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!gso.compute_row(rows, k)) throw ReductionError("Gram-Schmidt: rows are linearly dependent");
    Rational v(gso.d[k + 1], gso.d[k]);
    v.canonicalize();
    out.push_back(v);
  }
  return out;
}

BasisProfile basis_profile(const IntMatrix& b) {
  BasisProfile profile;
  profile.squared_norms = gram_schmidt_squared_norms(b);
  auto log_of = [](const BigInt& z) {
    long exp = 0;
    const double mant = mpz_get_d_2exp(&exp, z.get_mpz_t());
    return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
  };
  for (const auto& s : profile.squared_norms) {
    profile.log_norms.push_back(0.5 * (log_of(s.get_num()) - log_of(s.get_den())));
  }
  for (std::size_t i = 0; i + 1 < profile.log_norms.size(); ++i) {
    const double step = profile.log_norms[i] - profile.log_norms[i + 1];
    if (step > 0) profile.drop += step;
  }
  return profile;
}

InternalLllReducer::InternalLllReducer(Rational delta) : delta_(std::move(delta)) {
  check_delta(delta_);
}

ReductionRun InternalLllReducer::run(const IntMatrix& basis) const {
  return ReductionRun{lll_reduce(basis, delta_), {}};
}

std::string InternalLllReducer::description() const { return "lll delta=" + delta_.get_str(); }

}  // namespace ntruknap
