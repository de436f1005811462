#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace ntruknap {

using BigInt = mpz_class;
using Rational = mpq_class;
using IntVector = std::vector<BigInt>;

// Dense row-major integer matrix; rows are stored separately so that row
// swaps during reduction are O(1).
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols);
  explicit IntMatrix(std::vector<IntVector> rows);

  static IntMatrix identity(std::size_t n);
  static IntMatrix from_int64(const std::vector<std::vector<long>>& rows);

  std::size_t rows() const { return rows_.size(); }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows() == cols_; }

  BigInt& operator()(std::size_t i, std::size_t j) { return rows_[i][j]; }
  const BigInt& operator()(std::size_t i, std::size_t j) const { return rows_[i][j]; }

  IntVector& row(std::size_t i) { return rows_[i]; }
  const IntVector& row(std::size_t i) const { return rows_[i]; }
  IntVector column(std::size_t j) const;
  const std::vector<IntVector>& row_data() const { return rows_; }

  void swap_rows(std::size_t a, std::size_t b) { rows_[a].swap(rows_[b]); }
  void swap_columns(std::size_t a, std::size_t b);

  IntMatrix transpose() const;
  IntMatrix operator*(const IntMatrix& rhs) const;
  IntVector apply(std::span<const BigInt> x) const;  // this * x

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

 private:
  std::vector<IntVector> rows_;
  std::size_t cols_ = 0;
};

BigInt dot(std::span<const BigInt> a, std::span<const BigInt> b);
BigInt squared_norm(std::span<const BigInt> v);
// Non-negative gcd of all entries (0 for the zero vector).
BigInt content(std::span<const BigInt> v);

// Exact determinant by fraction-free (Bareiss) elimination.
BigInt determinant(const IntMatrix& m);

// Rank over Q.
std::size_t rank(const IntMatrix& m);

// Rational solution x of x * B = v for square nonsingular B, or nullopt when
// B is singular.
std::optional<std::vector<Rational>> solve_left(const IntMatrix& b, std::span<const BigInt> v);

// Bracketed text format: "[[a b c]\n[d e f]\n]". The parser accepts any
// whitespace (and optional commas) between tokens.
std::string format_matrix(const IntMatrix& m);
IntMatrix parse_matrix(std::string_view text);

std::string format_vector(std::span<const BigInt> v);

}  // namespace ntruknap
