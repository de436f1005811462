#include "ntruknap/snf.hpp"

#include <algorithm>

#include "ntruknap/errors.hpp"

namespace ntruknap {

namespace {

struct Work {
  IntMatrix d;
  IntMatrix p;
  IntMatrix q;

  // row_i -= f * row_j
  void row_sub(std::size_t i, std::size_t j, const BigInt& f) {
    for (std::size_t c = 0; c < d.cols(); ++c) d(i, c) -= f * d(j, c);
    for (std::size_t c = 0; c < p.cols(); ++c) p(i, c) -= f * p(j, c);
  }
  // col_i -= f * col_j
  void col_sub(std::size_t i, std::size_t j, const BigInt& f) {
    for (std::size_t r = 0; r < d.rows(); ++r) d(r, i) -= f * d(r, j);
    for (std::size_t r = 0; r < q.rows(); ++r) q(r, i) -= f * q(r, j);
  }
  void row_swap(std::size_t i, std::size_t j) {
    d.swap_rows(i, j);
    p.swap_rows(i, j);
  }
  void col_swap(std::size_t i, std::size_t j) {
    d.swap_columns(i, j);
    q.swap_columns(i, j);
  }
  void row_negate(std::size_t i) {
    for (auto& v : d.row(i)) v = -v;
    for (auto& v : p.row(i)) v = -v;
  }
};

// Position of the smallest nonzero |entry| of d[t:, t:].
std::optional<std::pair<std::size_t, std::size_t>> smallest_entry(const IntMatrix& d, std::size_t t) {
  std::optional<std::pair<std::size_t, std::size_t>> best;
  BigInt best_abs;
  for (std::size_t i = t; i < d.rows(); ++i) {
    for (std::size_t j = t; j < d.cols(); ++j) {
      if (sgn(d(i, j)) == 0) continue;
      BigInt v = abs(d(i, j));
      if (!best || v < best_abs) {
        best = {i, j};
        best_abs = v;
      }
    }
  }
  return best;
}

// Smallest nonzero |entry| in row t and column t (from t on).
std::pair<std::size_t, std::size_t> smallest_in_cross(const IntMatrix& d, std::size_t t) {
  std::pair<std::size_t, std::size_t> best{t, t};
  BigInt best_abs = abs(d(t, t));
  auto consider = [&](std::size_t i, std::size_t j) {
    if (sgn(d(i, j)) == 0) return;
    BigInt v = abs(d(i, j));
    if (sgn(best_abs) == 0 || v < best_abs) {
      best = {i, j};
      best_abs = v;
    }
  };
  for (std::size_t i = t + 1; i < d.rows(); ++i) consider(i, t);
  for (std::size_t j = t + 1; j < d.cols(); ++j) consider(t, j);
  return best;
}

}  // namespace

SnfDecomposition smith_normal_form(const IntMatrix& a) {
  const std::size_t k = a.rows();
  const std::size_t n = a.cols();
  Work w{a, IntMatrix::identity(k), IntMatrix::identity(n)};
  std::vector<BigInt> divisors;

  for (std::size_t t = 0; t < std::min(k, n); ++t) {
    auto start = smallest_entry(w.d, t);
    if (!start) break;
    w.row_swap(t, start->first);
    w.col_swap(t, start->second);

    for (;;) {
      bool clean = true;
      for (std::size_t i = t + 1; i < k; ++i) {
        if (sgn(w.d(i, t)) == 0) continue;
        BigInt f;
        mpz_tdiv_q(f.get_mpz_t(), w.d(i, t).get_mpz_t(), w.d(t, t).get_mpz_t());
        if (sgn(f) != 0) w.row_sub(i, t, f);
        clean = clean && sgn(w.d(i, t)) == 0;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (sgn(w.d(t, j)) == 0) continue;
        BigInt f;
        mpz_tdiv_q(f.get_mpz_t(), w.d(t, j).get_mpz_t(), w.d(t, t).get_mpz_t());
        if (sgn(f) != 0) w.col_sub(j, t, f);
        clean = clean && sgn(w.d(t, j)) == 0;
      }
      if (!clean) {
        auto [pi, pj] = smallest_in_cross(w.d, t);
        w.row_swap(t, pi);
        w.col_swap(t, pj);
        continue;
      }
      // Pivot must divide the remaining block; otherwise pull the offending
      // row into row t and clear again.
      std::optional<std::size_t> offending;
      for (std::size_t i = t + 1; i < k && !offending; ++i) {
        for (std::size_t j = t + 1; j < n; ++j) {
          if (!mpz_divisible_p(w.d(i, j).get_mpz_t(), w.d(t, t).get_mpz_t())) {
            offending = i;
            break;
          }
        }
      }
      if (!offending) break;
      w.row_sub(t, *offending, BigInt(-1));
    }
    if (sgn(w.d(t, t)) < 0) w.row_negate(t);
    divisors.push_back(w.d(t, t));
  }
  return SnfDecomposition{std::move(w.d), std::move(w.p), std::move(w.q), std::move(divisors)};
}

std::vector<IntVector> kernel_basis(const SnfDecomposition& snf) {
  std::vector<IntVector> out;
  for (std::size_t j = snf.rank(); j < snf.q.cols(); ++j) out.push_back(snf.q.column(j));
  return out;
}

std::vector<IntVector> kernel_basis(const IntMatrix& a) { return kernel_basis(smith_normal_form(a)); }

bool check_precondition(const IntMatrix& a) {
  const std::size_t k = a.rows();
  const std::size_t n = a.cols();
  auto snf = smith_normal_form(a);
  if (snf.rank() < k) throw ParameterError("check_precondition: A does not have full row rank");
  std::vector<IntVector> stacked = kernel_basis(snf);
  for (std::size_t j = 0; j < k; ++j) {
    IntVector e(n, BigInt(0));
    e[j] = 1;
    stacked.push_back(std::move(e));
  }
  return rank(IntMatrix(std::move(stacked))) == n;
}

ScalingCheck scaling_bound(const IntMatrix& a, std::span<const int> r, const BigInt& n1, const BigInt& q) {
  const std::size_t k = a.rows();
  const std::size_t n = a.cols();
  if (r.size() != n) throw ParameterError("scaling_bound: solution length differs from A");
  ScalingCheck check;
  check.precondition_holds = check_precondition(a);
  if (!check.precondition_holds) throw ParameterError("scaling_bound: kernel meets span(e_1..e_k)");

  // r' = (r, n1, 0_k)
  BigInt r_norm = n1 * n1;
  for (int v : r) r_norm += v * v;
  BigInt largest = r_norm;
  for (const auto& kv : kernel_basis(a)) largest = std::max(largest, squared_norm(kv));
  // y'_j = (q e_j, 0_{k+1}) for j = 1..k-1
  if (k >= 2) largest = std::max(largest, BigInt(q * q));

  BigInt scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 2, n + k);
  check.c_bound = scale * largest;
  BigInt root;
  mpz_sqrt(root.get_mpz_t(), check.c_bound.get_mpz_t());
  check.n2_min = root + 1;
  check.lower_bound_ok = scale * n1 * n1 < check.c_bound;
  return check;
}

bool check_zero_block(const IntMatrix& reduced, std::size_t n_prime, std::size_t k, const BigInt& n1) {
  if (reduced.cols() < n_prime + k + 1 || reduced.rows() < n_prime) {
    throw ParameterError("check_zero_block: basis smaller than the layout");
  }
  for (std::size_t i = 0; i < n_prime; ++i) {
    for (std::size_t j = n_prime + 1; j <= n_prime + k; ++j) {
      if (sgn(reduced(i, j)) != 0) return false;
    }
  }
  for (std::size_t i = 0; i < reduced.rows(); ++i) {
    if (!mpz_divisible_p(reduced(i, n_prime).get_mpz_t(), n1.get_mpz_t())) return false;
  }
  return true;
}

bool check_zero_block(const IntegerBasis& reduced) {
  if (!reduced.layout) throw ParameterError("check_zero_block: basis has no embedding layout");
  return check_zero_block(reduced.rows, reduced.layout->n_prime, reduced.layout->k, reduced.layout->n1);
}

}  // namespace ntruknap
