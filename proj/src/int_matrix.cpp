#include "ntruknap/int_matrix.hpp"

#include <cctype>
#include <sstream>
#include <utility>

#include "ntruknap/errors.hpp"

namespace ntruknap {

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows, IntVector(cols, BigInt(0))), cols_(cols) {}

IntMatrix::IntMatrix(std::vector<IntVector> rows) : rows_(std::move(rows)) {
  cols_ = rows_.empty() ? 0 : rows_.front().size();
  for (const auto& r : rows_) {
    if (r.size() != cols_) throw ParameterError("IntMatrix: ragged rows");
  }
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::from_int64(const std::vector<std::vector<long>>& rows) {
  std::vector<IntVector> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    IntVector v;
    v.reserve(r.size());
    for (long x : r) v.emplace_back(x);
    out.push_back(std::move(v));
  }
  return IntMatrix(std::move(out));
}

IntVector IntMatrix::column(std::size_t j) const {
  IntVector out;
  out.reserve(rows());
  for (const auto& r : rows_) out.push_back(r[j]);
  return out;
}

void IntMatrix::swap_columns(std::size_t a, std::size_t b) {
  for (auto& r : rows_) std::swap(r[a], r[b]);
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix t(cols_, rows());
  for (std::size_t i = 0; i < rows(); ++i) {
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = rows_[i][j];
  }
  return t;
}

IntMatrix IntMatrix::operator*(const IntMatrix& rhs) const {
  if (cols_ != rhs.rows()) throw ParameterError("IntMatrix: product dimension mismatch");
  IntMatrix out(rows(), rhs.cols());
  for (std::size_t i = 0; i < rows(); ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const BigInt& a = rows_[i][k];
      if (sgn(a) == 0) continue;
      for (std::size_t j = 0; j < rhs.cols(); ++j) {
        mpz_addmul(out(i, j).get_mpz_t(), a.get_mpz_t(), rhs(k, j).get_mpz_t());
      }
    }
  }
  return out;
}

IntVector IntMatrix::apply(std::span<const BigInt> x) const {
  if (x.size() != cols_) throw ParameterError("IntMatrix: vector length mismatch");
  IntVector out(rows(), BigInt(0));
  for (std::size_t i = 0; i < rows(); ++i) out[i] = dot(rows_[i], x);
  return out;
}

BigInt dot(std::span<const BigInt> a, std::span<const BigInt> b) {
  if (a.size() != b.size()) throw ParameterError("dot: length mismatch");
  BigInt acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mpz_addmul(acc.get_mpz_t(), a[i].get_mpz_t(), b[i].get_mpz_t());
  }
  return acc;
}

BigInt squared_norm(std::span<const BigInt> v) { return dot(v, v); }

BigInt content(std::span<const BigInt> v) {
  BigInt g = 0;
  for (const auto& x : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  return g;
}

namespace {

// In-place Bareiss elimination with row pivoting. Returns the rank; `sign`
// tracks row swaps. After the call, a(r-1, r-1) (for full rank square input)
// holds the determinant up to sign.
std::size_t bareiss(std::vector<IntVector>& a, std::size_t cols, int& sign) {
  const std::size_t n = a.size();
  sign = 1;
  BigInt prev = 1;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < n; ++c) {
    std::size_t piv = r;
    while (piv < n && sgn(a[piv][c]) == 0) ++piv;
    if (piv == n) continue;
    if (piv != r) {
      a[piv].swap(a[r]);
      sign = -sign;
    }
    for (std::size_t i = r + 1; i < n; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j) {
        BigInt t = a[r][c] * a[i][j] - a[i][c] * a[r][j];
        mpz_divexact(a[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      a[i][c] = 0;
    }
    prev = a[r][c];
    ++r;
  }
  return r;
}

}  // namespace

BigInt determinant(const IntMatrix& m) {
  if (!m.is_square()) throw ParameterError("determinant: matrix not square");
  if (m.rows() == 0) return 1;
  auto a = m.row_data();
  int sign = 1;
  const std::size_t r = bareiss(a, m.cols(), sign);
  if (r < m.rows()) return 0;
  BigInt det = a[r - 1][m.cols() - 1];
  return sign < 0 ? BigInt(-det) : det;
}

std::size_t rank(const IntMatrix& m) {
  auto a = m.row_data();
  int sign = 1;
  return bareiss(a, m.cols(), sign);
}

std::optional<std::vector<Rational>> solve_left(const IntMatrix& b, std::span<const BigInt> v) {
  if (!b.is_square()) throw ParameterError("solve_left: basis not square");
  if (v.size() != b.cols()) throw ParameterError("solve_left: dimension mismatch");
  const std::size_t n = b.rows();
  // x * B = v  <=>  B^T x^T = v^T; eliminate on the augmented [B^T | v].
  std::vector<IntVector> a(n, IntVector(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = b(j, i);
    a[i][n] = v[i];
  }
  int sign = 1;
  BigInt prev = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && sgn(a[piv][c]) == 0) ++piv;
    if (piv == n) return std::nullopt;
    if (piv != c) {
      a[piv].swap(a[c]);
      sign = -sign;
    }
    for (std::size_t i = c + 1; i < n; ++i) {
      for (std::size_t j = c + 1; j <= n; ++j) {
        BigInt t = a[c][c] * a[i][j] - a[i][c] * a[c][j];
        mpz_divexact(a[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      a[i][c] = 0;
    }
    prev = a[c][c];
  }
  std::vector<Rational> x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    Rational acc(a[ii][n]);
    for (std::size_t j = ii + 1; j < n; ++j) acc -= Rational(a[ii][j]) * x[j];
    x[ii] = acc / Rational(a[ii][ii]);
    x[ii].canonicalize();
  }
  return x;
}

std::string format_matrix(const IntMatrix& m) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out << '[';
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << m(i, j).get_str();
    }
    out << "]\n";
  }
  out << "]\n";
  return out.str();
}

std::string format_vector(std::span<const BigInt> v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += v[i].get_str();
  }
  return out + "]";
}

IntMatrix parse_matrix(std::string_view text) {
  std::size_t pos = 0;
  auto skip = [&] {
    while (pos < text.size() && (std::isspace(static_cast<unsigned char>(text[pos])) || text[pos] == ',')) ++pos;
  };
  auto expect = [&](char ch) {
    skip();
    if (pos >= text.size() || text[pos] != ch) {
      throw ParameterError(std::string("parse_matrix: expected '") + ch + "' at offset " + std::to_string(pos));
    }
    ++pos;
  };

  expect('[');
  std::vector<IntVector> rows;
  for (;;) {
    skip();
    if (pos < text.size() && text[pos] == ']') {
      ++pos;
      break;
    }
    expect('[');
    IntVector row;
    for (;;) {
      skip();
      if (pos >= text.size()) throw ParameterError("parse_matrix: unterminated row");
      if (text[pos] == ']') {
        ++pos;
        break;
      }
      const std::size_t start = pos;
      if (text[pos] == '-' || text[pos] == '+') ++pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      std::string token(text.substr(start, pos - start));
      if (!token.empty() && token[0] == '+') token.erase(0, 1);
      BigInt value;
      if (token.empty() || token == "-" || value.set_str(token, 10) != 0) {
        throw ParameterError("parse_matrix: bad integer at offset " + std::to_string(start));
      }
      row.push_back(std::move(value));
    }
    rows.push_back(std::move(row));
  }
  skip();
  if (pos != text.size()) throw ParameterError("parse_matrix: trailing characters");
  return IntMatrix(std::move(rows));
}

}  // namespace ntruknap
