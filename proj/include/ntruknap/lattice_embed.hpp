#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "ntruknap/int_matrix.hpp"
#include "ntruknap/knapsack.hpp"

namespace ntruknap {

// Weights of the marker coordinate (n1) and of the congruence block (n2).
struct ScalingParams {
  BigInt n1;
  BigInt n2;

  // Throws ParameterError unless 1 <= n1 < n2.
  ScalingParams(BigInt n1, BigInt n2);

  // n2 = ceil(q^x); x is a decimal string such as "8" or "2.5".
  static ScalingParams from_exponent(const BigInt& n1, const BigInt& q, std::string_view x);
};

// ceil(q^x) computed exactly for a decimal exponent x >= 0.
BigInt ceil_power(const BigInt& q, std::string_view x);

// Block geometry of an embedding basis: n_prime unknowns, k congruences.
// Layout of a row vector: [0, n_prime) unknowns, n_prime marker, then k
// congruence coordinates.
struct EmbedLayout {
  std::size_t n_prime = 0;
  std::size_t k = 0;
  BigInt n1;
  BigInt n2;
  BigInt q;

  std::size_t dimension() const { return n_prime + k + 1; }
  std::size_t marker_column() const { return n_prime; }
};

// Square basis whose rows generate the lattice, plus the block layout when it
// came from an embedding.
struct IntegerBasis {
  IntMatrix rows;
  std::optional<EmbedLayout> layout;

  std::size_t dimension() const { return rows.rows(); }
};

//   [ I_n'   0    n2 A^T     ]
//   [ 0      n1  -n2 T^T     ]
//   [ 0      0    n2 q I_k   ]
IntegerBasis build_bk(const KnapsackSystem& sys, const ScalingParams& scale);

// Same construction for a system reduced by known nonce coefficients.
IntegerBasis build_bz(const KnapsackSystem& sys_z, const ScalingParams& scale);

// n1 (n2 q)^k
BigInt expected_determinant(const EmbedLayout& layout);

// (x, n1, 0_k)
IntVector embed_solution(std::span<const int> x, const ScalingParams& scale, std::size_t k);

// Exact membership of v in the lattice spanned by the rows of b (square,
// nonsingular). Upper-triangular bases are handled by back-substitution;
// anything else by an exact rational solve.
bool is_lattice_point(const IntMatrix& b, std::span<const BigInt> v);

}  // namespace ntruknap
