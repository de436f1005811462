#include "ntruknap/lattice_embed.hpp"

#include <cctype>

#include "ntruknap/errors.hpp"

namespace ntruknap {

namespace {

bool is_upper_triangular(const IntMatrix& b) {
  for (std::size_t i = 0; i < b.rows(); ++i) {
    if (sgn(b(i, i)) == 0) return false;
    for (std::size_t j = 0; j < i; ++j) {
      if (sgn(b(i, j)) != 0) return false;
    }
  }
  return true;
}

}  // namespace

ScalingParams::ScalingParams(BigInt n1_value, BigInt n2_value)
    : n1(std::move(n1_value)), n2(std::move(n2_value)) {
  if (n1 < 1) throw ParameterError("ScalingParams: N1 must be positive");
  if (n1 >= n2) throw ParameterError("ScalingParams: need N1 < N2");
}

ScalingParams ScalingParams::from_exponent(const BigInt& n1, const BigInt& q, std::string_view x) {
  return ScalingParams(n1, ceil_power(q, x));
}

BigInt ceil_power(const BigInt& q, std::string_view x) {
  if (q < 1) throw ParameterError("ceil_power: base must be positive");
  // x = whole.frac  ->  num / 10^digits(frac)
  std::string digits;
  unsigned long frac_digits = 0;
  bool seen_point = false;
  for (char ch : x) {
    if (ch == '.' && !seen_point) {
      seen_point = true;
    } else if (std::isdigit(static_cast<unsigned char>(ch))) {
      digits += ch;
      frac_digits += seen_point ? 1 : 0;
    } else {
      throw ParameterError("ceil_power: exponent must be a non-negative decimal, got '" + std::string(x) + "'");
    }
  }
  if (digits.empty()) throw ParameterError("ceil_power: empty exponent");
  BigInt num(digits);
  BigInt den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_digits);
  BigInt g = gcd(num, den);
  num /= g;
  den /= g;
  if (!num.fits_ulong_p() || !den.fits_ulong_p()) throw ParameterError("ceil_power: exponent too large");

  // smallest n with n^den >= q^num
  BigInt target;
  mpz_pow_ui(target.get_mpz_t(), q.get_mpz_t(), num.get_ui());
  BigInt root;
  const bool exact = mpz_root(root.get_mpz_t(), target.get_mpz_t(), den.get_ui()) != 0;
  return exact ? root : BigInt(root + 1);
}

IntegerBasis build_bk(const KnapsackSystem& sys, const ScalingParams& scale) {
  const std::size_t n = sys.cols();
  const std::size_t k = sys.rows();
  const std::size_t dim = n + k + 1;
  IntMatrix b(dim, dim);
  for (std::size_t i = 0; i < n; ++i) {
    b(i, i) = 1;
    for (std::size_t j = 0; j < k; ++j) b(i, n + 1 + j) = scale.n2 * sys.a(j, i);
  }
  b(n, n) = scale.n1;
  for (std::size_t j = 0; j < k; ++j) b(n, n + 1 + j) = -scale.n2 * sys.t[j];
  const BigInt diag = scale.n2 * sys.q;
  for (std::size_t j = 0; j < k; ++j) b(n + 1 + j, n + 1 + j) = diag;
  return IntegerBasis{std::move(b), EmbedLayout{n, k, scale.n1, scale.n2, sys.q}};
}

IntegerBasis build_bz(const KnapsackSystem& sys_z, const ScalingParams& scale) {
  return build_bk(sys_z, scale);
}

BigInt expected_determinant(const EmbedLayout& layout) {
  BigInt factor = layout.n2 * layout.q;
  BigInt power;
  mpz_pow_ui(power.get_mpz_t(), factor.get_mpz_t(), layout.k);
  return layout.n1 * power;
}

IntVector embed_solution(std::span<const int> x, const ScalingParams& scale, std::size_t k) {
  IntVector v;
  v.reserve(x.size() + k + 1);
  for (int xi : x) {
    if (xi < -1 || xi > 1) throw ParameterError("embed_solution: entry not ternary");
    v.emplace_back(xi);
  }
  v.push_back(scale.n1);
  v.resize(x.size() + k + 1, BigInt(0));
  return v;
}

bool is_lattice_point(const IntMatrix& b, std::span<const BigInt> v) {
  if (!b.is_square() || v.size() != b.cols()) {
    throw ParameterError("is_lattice_point: dimension mismatch");
  }
  const std::size_t n = b.rows();
  if (is_upper_triangular(b)) {
    // v = sum c_i b_i; column j only sees rows i <= j.
    IntVector rest(v.begin(), v.end());
    for (std::size_t j = 0; j < n; ++j) {
      if (!mpz_divisible_p(rest[j].get_mpz_t(), b(j, j).get_mpz_t())) return false;
      BigInt c;
      mpz_divexact(c.get_mpz_t(), rest[j].get_mpz_t(), b(j, j).get_mpz_t());
      if (sgn(c) == 0) continue;
      for (std::size_t t = j; t < n; ++t) {
        mpz_submul(rest[t].get_mpz_t(), c.get_mpz_t(), b(j, t).get_mpz_t());
      }
    }
    return true;
  }
  auto x = solve_left(b, v);
  if (!x) throw ParameterError("is_lattice_point: basis is singular");
  for (const auto& c : *x) {
    if (c.get_den() != 1) return false;
  }
  return true;
}

}  // namespace ntruknap
