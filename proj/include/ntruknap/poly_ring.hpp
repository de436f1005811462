#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ntruknap/rng.hpp"

namespace ntruknap {

using Coeff = std::int64_t;

// Element of (Z/modulus)[x]/(x^N - 1). Coefficients are kept in [0, modulus);
// the constructor reduces whatever it is given.
class ModPoly {
 public:
  ModPoly(std::vector<Coeff> coeffs, Coeff modulus);

  static ModPoly zero(int n, Coeff modulus);
  static ModPoly one(int n, Coeff modulus);
  // x^e for 0 <= e < n.
  static ModPoly monomial(int n, int e, Coeff modulus);

  int size() const { return static_cast<int>(coeffs_.size()); }
  Coeff modulus() const { return modulus_; }
  std::span<const Coeff> coeffs() const { return coeffs_; }
  Coeff operator[](int i) const { return coeffs_[static_cast<std::size_t>(i)]; }

  ModPoly operator+(const ModPoly& other) const;
  ModPoly operator-(const ModPoly& other) const;
  ModPoly scaled(Coeff factor) const;

  friend bool operator==(const ModPoly&, const ModPoly&) = default;

 private:
  std::vector<Coeff> coeffs_;
  Coeff modulus_;
};

// Centerlifted representative in Z[x]/(x^N - 1).
class IntegerPoly {
 public:
  explicit IntegerPoly(std::vector<Coeff> coeffs) : coeffs_(std::move(coeffs)) {}

  int size() const { return static_cast<int>(coeffs_.size()); }
  std::span<const Coeff> coeffs() const { return coeffs_; }
  Coeff operator[](int i) const { return coeffs_[static_cast<std::size_t>(i)]; }

  ModPoly reduce(Coeff modulus) const { return ModPoly(coeffs_, modulus); }

  friend bool operator==(const IntegerPoly&, const IntegerPoly&) = default;

 private:
  std::vector<Coeff> coeffs_;
};

// Polynomial with coefficients in {-1, 0, 1}.
class TernaryPoly {
 public:
  // Throws ParameterError on a non-ternary entry.
  explicit TernaryPoly(std::vector<int> coeffs);

  static TernaryPoly zero(int n) { return TernaryPoly(std::vector<int>(static_cast<std::size_t>(n), 0)); }

  int size() const { return static_cast<int>(coeffs_.size()); }
  std::span<const int> coeffs() const { return coeffs_; }
  int operator[](int i) const { return coeffs_[static_cast<std::size_t>(i)]; }

  // (number of +1, number of -1)
  std::pair<int, int> weights() const;
  bool has_weights(int ones, int minus_ones) const;
  // True when the coefficient of x^(N-1) is zero (member of T_{N-2}).
  bool degree_below_top() const { return coeffs_.empty() || coeffs_.back() == 0; }
  int squared_norm() const;

  ModPoly to_mod(Coeff modulus) const;
  IntegerPoly to_integer() const;

  friend bool operator==(const TernaryPoly&, const TernaryPoly&) = default;

 private:
  std::vector<int> coeffs_;
};

// Cyclic convolution c_k = sum_{i+j = k mod N} a_i b_j, reduced mod q.
// Throws ParameterError when lengths or moduli differ.
ModPoly conv_mod(const ModPoly& a, const ModPoly& b);

// Inverse of f in (Z/m)[x]/(x^N - 1) for m a prime power (3 and 2^e are the
// scheme cases). Extended Euclid over GF(p)[x] gives the inverse mod p, then
// Newton iteration F <- F(2 - fF) lifts it to m.
// Returns nullopt when f is not invertible; throws ParameterError when the
// modulus is not a prime power.
std::optional<ModPoly> invert_poly(const ModPoly& f);

// Coefficients mapped into (-q/2, q/2].
IntegerPoly centerlift(const ModPoly& p);
Coeff centerlift(Coeff value, Coeff modulus);

// Uniform element of T_{N-2}: coefficients 0..N-2 uniform in {-1,0,1}, the
// top coefficient zero.
TernaryPoly sample_ternary(int n, Rng& rng);

// Uniform element of T_{N-2}(d1, d2). Throws ParameterError if d1+d2 > N-1.
TernaryPoly sample_fixed_weight(int n, int d1, int d2, Rng& rng);

// Inverse of a modulo m; throws ParameterError when gcd(a, m) != 1.
Coeff inverse_mod(Coeff a, Coeff m);

// t with 3t = 1 mod q.
Coeff inv3_mod_q(Coeff q);

bool is_power_of_two(Coeff value);
bool is_prime(Coeff value);

}  // namespace ntruknap
