#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ntruknap/int_matrix.hpp"
#include "ntruknap/lattice_embed.hpp"

namespace ntruknap {

// P * A * Q = D with P, Q unimodular, D diagonal with positive elementary
// divisors d_1 | d_2 | ... | d_r followed by zeros.
struct SnfDecomposition {
  IntMatrix d;
  IntMatrix p;
  IntMatrix q;
  std::vector<BigInt> divisors;

  std::size_t rank() const { return divisors.size(); }
};

// Classical elimination: move the smallest nonzero entry to the pivot, clear
// its row and column by Euclidean steps, and fold any entry the pivot does not
// divide back into the pivot row until it does.
SnfDecomposition smith_normal_form(const IntMatrix& a);

// Integer kernel basis: the last N - r columns of Q.
std::vector<IntVector> kernel_basis(const IntMatrix& a);
std::vector<IntVector> kernel_basis(const SnfDecomposition& snf);

// For full-row-rank A (k x N): do the kernel vectors together with
// e_1..e_k span R^N? Throws ParameterError when rank(A) < k.
bool check_precondition(const IntMatrix& a);

struct ScalingCheck {
  bool precondition_holds = false;
  // 2^{N+k} max(|r'|^2, |q'_j|^2, |y'_j|^2)
  BigInt c_bound;
  // smallest N2 with N2^2 > c_bound
  BigInt n2_min;
  // 2^{N+k} N1^2 < c_bound
  bool lower_bound_ok = false;
  // Filled in by callers that replay the reduction.
  std::optional<bool> zero_block_ok;
};

// Evaluates the scaling bound for the system A x = T (mod q) with known
// solution r. Throws ParameterError when the precondition fails.
ScalingCheck scaling_bound(const IntMatrix& a, std::span<const int> r, const BigInt& n1, const BigInt& q);

// Rows [0, n') vanish on the congruence columns [n'+1, n'+k], and n1 divides
// every entry of the marker column n'.
bool check_zero_block(const IntMatrix& reduced, std::size_t n_prime, std::size_t k, const BigInt& n1);
bool check_zero_block(const IntegerBasis& reduced);

}  // namespace ntruknap
