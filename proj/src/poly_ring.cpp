#include "ntruknap/poly_ring.hpp"

#include <algorithm>
#include <string>

#include "ntruknap/errors.hpp"

namespace ntruknap {

namespace {

using Poly = std::vector<Coeff>;  // dense, low degree first, over GF(p)

Coeff mod_floor(Coeff v, Coeff m) {
  Coeff r = v % m;
  return r < 0 ? r + m : r;
}

Coeff mul_mod(Coeff a, Coeff b, Coeff m) {
  return static_cast<Coeff>((static_cast<__int128>(a) * b) % m);
}

void trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

int degree(const Poly& p) { return static_cast<int>(p.size()) - 1; }

// a - b*c over GF(p).
Poly sub_mul(const Poly& a, const Poly& b, const Poly& c, Coeff p) {
  Poly out(std::max(a.size(), b.empty() || c.empty() ? 0 : b.size() + c.size() - 1), 0);
  std::copy(a.begin(), a.end(), out.begin());
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i] == 0) continue;
    for (std::size_t j = 0; j < c.size(); ++j) {
      out[i + j] = mod_floor(out[i + j] - mul_mod(b[i], c[j], p), p);
    }
  }
  trim(out);
  return out;
}

// Quotient and remainder of a / b over GF(p); b nonzero and trimmed.
std::pair<Poly, Poly> divmod(Poly a, const Poly& b, Coeff p) {
  trim(a);
  if (degree(a) < degree(b)) return {Poly{}, a};
  Poly quot(static_cast<std::size_t>(degree(a) - degree(b) + 1), 0);
  const Coeff lead_inv = inverse_mod(b.back(), p);
  while (!a.empty() && degree(a) >= degree(b)) {
    const int shift = degree(a) - degree(b);
    const Coeff factor = mul_mod(a.back(), lead_inv, p);
    quot[static_cast<std::size_t>(shift)] = factor;
    for (std::size_t j = 0; j < b.size(); ++j) {
      auto& slot = a[j + static_cast<std::size_t>(shift)];
      slot = mod_floor(slot - mul_mod(factor, b[j], p), p);
    }
    trim(a);
  }
  return {quot, a};
}

// Inverse of f modulo (p, x^N - 1) for a prime p.
std::optional<Poly> invert_mod_prime(std::span<const Coeff> f, Coeff p) {
  const auto n = f.size();
  Poly r0(n + 1, 0);
  r0[0] = mod_floor(-1, p);
  r0[n] = 1;
  Poly r1(f.begin(), f.end());
  for (auto& c : r1) c = mod_floor(c, p);
  trim(r1);
  if (r1.empty()) return std::nullopt;

  Poly s0;       // Bezout coefficient of f paired with r0
  Poly s1{1};    // ... and with r1
  while (!r1.empty()) {
    auto [quot, rem] = divmod(r0, r1, p);
    Poly s2 = sub_mul(s0, quot, s1, p);
    r0 = std::move(r1);
    r1 = std::move(rem);
    s0 = std::move(s1);
    s1 = std::move(s2);
  }
  if (degree(r0) != 0) return std::nullopt;

  const Coeff scale = inverse_mod(r0[0], p);
  Poly inv(n, 0);
  for (std::size_t i = 0; i < s0.size(); ++i) {
    auto& slot = inv[i % n];
    slot = mod_floor(slot + mul_mod(s0[i], scale, p), p);
  }
  return inv;
}

// Returns p when m = p^e for a prime p, otherwise 0.
Coeff prime_power_base(Coeff m) {
  if (m < 2) return 0;
  Coeff p = 0;
  for (Coeff d = 2; d * d <= m; ++d) {
    if (m % d == 0) {
      p = d;
      break;
    }
  }
  if (p == 0) return m;
  while (m % p == 0) m /= p;
  return m == 1 ? p : 0;
}

}  // namespace

ModPoly::ModPoly(std::vector<Coeff> coeffs, Coeff modulus)
    : coeffs_(std::move(coeffs)), modulus_(modulus) {
  if (modulus_ < 1) throw ParameterError("ModPoly: modulus must be positive");
  for (auto& c : coeffs_) c = mod_floor(c, modulus_);
}

ModPoly ModPoly::zero(int n, Coeff modulus) {
  return ModPoly(std::vector<Coeff>(static_cast<std::size_t>(n), 0), modulus);
}

ModPoly ModPoly::one(int n, Coeff modulus) { return monomial(n, 0, modulus); }

ModPoly ModPoly::monomial(int n, int e, Coeff modulus) {
  if (e < 0 || e >= n) throw ParameterError("ModPoly::monomial: exponent out of range");
  std::vector<Coeff> c(static_cast<std::size_t>(n), 0);
  c[static_cast<std::size_t>(e)] = 1;
  return ModPoly(std::move(c), modulus);
}

ModPoly ModPoly::operator+(const ModPoly& other) const {
  if (size() != other.size() || modulus_ != other.modulus_) {
    throw ParameterError("ModPoly: operands differ in degree or modulus");
  }
  std::vector<Coeff> out(coeffs_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = coeffs_[i] + other.coeffs_[i];
  return ModPoly(std::move(out), modulus_);
}

ModPoly ModPoly::operator-(const ModPoly& other) const {
  if (size() != other.size() || modulus_ != other.modulus_) {
    throw ParameterError("ModPoly: operands differ in degree or modulus");
  }
  std::vector<Coeff> out(coeffs_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = coeffs_[i] - other.coeffs_[i];
  return ModPoly(std::move(out), modulus_);
}

ModPoly ModPoly::scaled(Coeff factor) const {
  std::vector<Coeff> out(coeffs_.size());
  const Coeff f = mod_floor(factor, modulus_);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = mul_mod(coeffs_[i], f, modulus_);
  return ModPoly(std::move(out), modulus_);
}

TernaryPoly::TernaryPoly(std::vector<int> coeffs) : coeffs_(std::move(coeffs)) {
  for (int c : coeffs_) {
    if (c < -1 || c > 1) throw ParameterError("TernaryPoly: coefficient outside {-1,0,1}");
  }
}

std::pair<int, int> TernaryPoly::weights() const {
  int ones = 0;
  int minus = 0;
  for (int c : coeffs_) {
    ones += c == 1;
    minus += c == -1;
  }
  return {ones, minus};
}

bool TernaryPoly::has_weights(int ones, int minus_ones) const {
  return weights() == std::pair{ones, minus_ones};
}

int TernaryPoly::squared_norm() const {
  int s = 0;
  for (int c : coeffs_) s += c * c;
  return s;
}

ModPoly TernaryPoly::to_mod(Coeff modulus) const {
  return ModPoly(std::vector<Coeff>(coeffs_.begin(), coeffs_.end()), modulus);
}

IntegerPoly TernaryPoly::to_integer() const {
  return IntegerPoly(std::vector<Coeff>(coeffs_.begin(), coeffs_.end()));
}

ModPoly conv_mod(const ModPoly& a, const ModPoly& b) {
  if (a.size() != b.size()) throw ParameterError("conv_mod: ring degree mismatch");
  if (a.modulus() != b.modulus()) throw ParameterError("conv_mod: modulus mismatch");
  const auto n = static_cast<std::size_t>(a.size());
  const Coeff q = a.modulus();
  const bool wide = q > (Coeff{1} << 40);
  std::vector<unsigned __int128> acc(n, 0);
  auto ac = a.coeffs();
  auto bc = b.coeffs();
  for (std::size_t i = 0; i < n; ++i) {
    if (ac[i] == 0) continue;
    const auto ai = static_cast<unsigned __int128>(ac[i]);
    // j < n - i lands on i + j, the rest wraps to i + j - n
    for (std::size_t j = 0; j < n - i; ++j) {
      auto t = ai * static_cast<std::uint64_t>(bc[j]);
      acc[i + j] += wide ? t % static_cast<std::uint64_t>(q) : t;
    }
    for (std::size_t j = n - i; j < n; ++j) {
      auto t = ai * static_cast<std::uint64_t>(bc[j]);
      acc[i + j - n] += wide ? t % static_cast<std::uint64_t>(q) : t;
    }
  }
  std::vector<Coeff> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = static_cast<Coeff>(acc[k] % static_cast<std::uint64_t>(q));
  }
  return ModPoly(std::move(out), q);
}

std::optional<ModPoly> invert_poly(const ModPoly& f) {
  const Coeff m = f.modulus();
  const Coeff p = prime_power_base(m);
  if (p == 0) {
    throw ParameterError("invert_poly: modulus " + std::to_string(m) + " is not a prime power");
  }
  auto base = invert_mod_prime(f.coeffs(), p);
  if (!base) return std::nullopt;

  ModPoly inv(std::move(*base), m);
  // Newton step doubles the p-adic precision; all arithmetic is done mod m
  // since only the residue mod m is wanted.
  const ModPoly two = ModPoly::one(f.size(), m).scaled(2);
  for (Coeff precision = p; precision < m;) {
    inv = conv_mod(inv, two - conv_mod(f, inv));
    precision = (precision > m / precision) ? m : precision * precision;
  }
  return inv;
}

Coeff centerlift(Coeff value, Coeff modulus) {
  Coeff r = mod_floor(value, modulus);
  return r > modulus / 2 ? r - modulus : r;
}

IntegerPoly centerlift(const ModPoly& p) {
  std::vector<Coeff> out(static_cast<std::size_t>(p.size()));
  for (int i = 0; i < p.size(); ++i) out[static_cast<std::size_t>(i)] = centerlift(p[i], p.modulus());
  return IntegerPoly(std::move(out));
}

TernaryPoly sample_ternary(int n, Rng& rng) {
  if (n < 1) throw ParameterError("sample_ternary: N must be positive");
  std::vector<int> c(static_cast<std::size_t>(n), 0);
  for (int i = 0; i + 1 < n; ++i) {
    c[static_cast<std::size_t>(i)] = static_cast<int>(rng.uniform(3)) - 1;
  }
  return TernaryPoly(std::move(c));
}

TernaryPoly sample_fixed_weight(int n, int d1, int d2, Rng& rng) {
  if (n < 1 || d1 < 0 || d2 < 0 || d1 + d2 > n - 1) {
    throw ParameterError("sample_fixed_weight: need d1, d2 >= 0 and d1 + d2 <= N - 1");
  }
  std::vector<int> c(static_cast<std::size_t>(n - 1), 0);
  std::fill_n(c.begin(), d1, 1);
  std::fill_n(c.begin() + d1, d2, -1);
  rng.shuffle(std::span<int>(c));
  c.push_back(0);
  return TernaryPoly(std::move(c));
}

Coeff inverse_mod(Coeff a, Coeff m) {
  if (m < 1) throw ParameterError("inverse_mod: modulus must be positive");
  Coeff old_r = mod_floor(a, m), r = m;
  Coeff old_s = 1, s = 0;
  while (r != 0) {
    const Coeff quot = old_r / r;
    old_r = std::exchange(r, old_r - quot * r);
    old_s = std::exchange(s, old_s - quot * s);
  }
  if (old_r != 1 && m != 1) {
    throw ParameterError("inverse_mod: " + std::to_string(a) + " not invertible mod " + std::to_string(m));
  }
  return mod_floor(old_s, m);
}

Coeff inv3_mod_q(Coeff q) {
  if (q % 3 == 0) throw ParameterError("inv3_mod_q: 3 divides q");
  return inverse_mod(3, q);
}

bool is_power_of_two(Coeff value) { return value > 0 && (value & (value - 1)) == 0; }

bool is_prime(Coeff value) {
  if (value < 2) return false;
  for (Coeff d = 2; d * d <= value; ++d) {
    if (value % d == 0) return false;
  }
  return true;
}

}  // namespace ntruknap
