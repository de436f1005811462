#include "ntruknap/knapsack.hpp"

#include <numeric>
#include <set>
#include <string>

#include "ntruknap/errors.hpp"

namespace ntruknap {

namespace {

BigInt mod_q(const BigInt& v, const BigInt& q) {
  BigInt r;
  mpz_fdiv_r(r.get_mpz_t(), v.get_mpz_t(), q.get_mpz_t());
  return r;
}

void check_ternary_map(const std::map<int, int>& leaks, int n, const char* what) {
  for (auto [pos, value] : leaks) {
    if (pos < 0 || pos >= n) throw ParameterError(std::string(what) + ": position out of range");
    if (value < -1 || value > 1) throw ParameterError(std::string(what) + ": value not ternary");
  }
}

BigInt json_bigint(const nlohmann::json& v) {
  if (v.is_string()) return BigInt(v.get<std::string>());
  return BigInt(v.get<long>());
}

nlohmann::json bigint_json(const BigInt& v) {
  if (v.fits_slong_p()) return v.get_si();
  return v.get_str();
}

}  // namespace

std::vector<Coeff> target_entries(const ModPoly& c, const std::map<int, int>& known_m) {
  check_ternary_map(known_m, c.size(), "target_entries");
  const Coeff q = c.modulus();
  const Coeff inv3 = inv3_mod_q(q);
  std::vector<Coeff> out;
  out.reserve(known_m.size());
  for (auto [i, m_i] : known_m) {
    const Coeff diff = ((c[i] - m_i) % q + q) % q;
    out.push_back(static_cast<Coeff>((static_cast<__int128>(diff) * inv3) % q));
  }
  return out;
}

IntMatrix circulant_rows(const ModPoly& h, std::span<const int> indices) {
  const int n = h.size();
  IntMatrix a(indices.size(), static_cast<std::size_t>(n));
  for (std::size_t row = 0; row < indices.size(); ++row) {
    const int l = indices[row];
    if (l < 0 || l >= n) throw ParameterError("circulant_rows: index out of range");
    for (int j = 0; j < n; ++j) {
      a(row, static_cast<std::size_t>(j)) = static_cast<long>(h[((l - j) % n + n) % n]);
    }
  }
  return a;
}

KnapsackSystem build_system(const ModPoly& c, const ModPoly& h, const LeakProfile& leak,
                            const NtruParams& params) {
  if (leak.known_m.empty()) throw ParameterError("build_system: no leaked message coefficients");
  if (c.size() != params.n || h.size() != params.n || c.modulus() != params.q || h.modulus() != params.q) {
    throw ParameterError("build_system: ciphertext/public key do not match parameters");
  }
  check_ternary_map(leak.known_m, params.n, "build_system");

  std::vector<int> indices;
  for (const auto& entry : leak.known_m) indices.push_back(entry.first);

  KnapsackSystem sys;
  sys.a = circulant_rows(h, indices);
  for (Coeff v : target_entries(c, leak.known_m)) sys.t.emplace_back(static_cast<long>(v));
  sys.q = static_cast<long>(params.q);
  sys.column_map.resize(static_cast<std::size_t>(params.n));
  std::iota(sys.column_map.begin(), sys.column_map.end(), 0);
  return sys;
}

KnapsackSystem reduce_system_with_known_r(const KnapsackSystem& sys,
                                          const std::map<int, int>& known_r) {
  std::map<int, std::size_t> column_of;
  for (std::size_t j = 0; j < sys.column_map.size(); ++j) column_of[sys.column_map[j]] = j;

  std::set<std::size_t> dropped;
  IntVector shift(sys.rows(), BigInt(0));
  for (auto [pos, value] : known_r) {
    auto it = column_of.find(pos);
    if (it == column_of.end()) throw ParameterError("reduce_system_with_known_r: unknown position");
    if (value < -1 || value > 1) throw ParameterError("reduce_system_with_known_r: value not ternary");
    dropped.insert(it->second);
    if (value == 0) continue;
    for (std::size_t i = 0; i < sys.rows(); ++i) {
      if (value == 1) {
        shift[i] += sys.a(i, it->second);
      } else {
        shift[i] -= sys.a(i, it->second);
      }
    }
  }
  if (dropped.size() >= sys.cols()) {
    throw ParameterError("reduce_system_with_known_r: every column is known");
  }

  KnapsackSystem out;
  out.q = sys.q;
  std::vector<IntVector> rows(sys.rows());
  for (std::size_t i = 0; i < sys.rows(); ++i) {
    for (std::size_t j = 0; j < sys.cols(); ++j) {
      if (!dropped.contains(j)) rows[i].push_back(sys.a(i, j));
    }
    out.t.push_back(mod_q(sys.t[i] - shift[i], sys.q));
  }
  out.a = IntMatrix(std::move(rows));
  for (std::size_t j = 0; j < sys.cols(); ++j) {
    if (!dropped.contains(j)) out.column_map.push_back(sys.column_map[j]);
  }
  return out;
}

std::vector<std::vector<int>> brute_force_solve(const KnapsackSystem& sys, std::size_t limit) {
  const std::size_t n = sys.cols();
  const std::size_t k = sys.rows();
  if (n > limit) {
    throw ParameterError("brute_force_solve: n = " + std::to_string(n) + " exceeds limit " +
                         std::to_string(limit));
  }
  // Depth-first over coordinates in order -1, 0, 1 keeps the output sorted.
  // residue[i] tracks T_i - sum_{j < depth} A_ij x_j.
  std::vector<std::vector<int>> out;
  std::vector<int> x(n, 0);
  std::vector<IntVector> residue(n + 1, IntVector(k));
  residue[0] = sys.t;

  auto recurse = [&](auto&& self, std::size_t depth) -> void {
    if (depth == n) {
      for (std::size_t i = 0; i < k; ++i) {
        if (!mpz_divisible_p(residue[n][i].get_mpz_t(), sys.q.get_mpz_t())) return;
      }
      out.push_back(x);
      return;
    }
    for (int v = -1; v <= 1; ++v) {
      x[depth] = v;
      for (std::size_t i = 0; i < k; ++i) {
        residue[depth + 1][i] = residue[depth][i] - v * sys.a(i, depth);
      }
      self(self, depth + 1);
    }
  };
  recurse(recurse, 0);
  return out;
}

bool verify_solution(const KnapsackSystem& sys, std::span<const int> x) {
  if (x.size() != sys.cols()) throw ParameterError("verify_solution: length mismatch");
  for (int v : x) {
    if (v < -1 || v > 1) return false;
  }
  for (std::size_t i = 0; i < sys.rows(); ++i) {
    BigInt acc = -sys.t[i];
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j] == 1) acc += sys.a(i, j);
      if (x[j] == -1) acc -= sys.a(i, j);
    }
    if (!mpz_divisible_p(acc.get_mpz_t(), sys.q.get_mpz_t())) return false;
  }
  return true;
}

nlohmann::json system_to_json(const KnapsackSystem& sys) {
  nlohmann::json a = nlohmann::json::array();
  for (std::size_t i = 0; i < sys.rows(); ++i) {
    for (std::size_t j = 0; j < sys.cols(); ++j) a.push_back(bigint_json(sys.a(i, j)));
  }
  nlohmann::json t = nlohmann::json::array();
  for (const auto& v : sys.t) t.push_back(bigint_json(v));
  return {{"q", bigint_json(sys.q)}, {"k", sys.rows()},   {"n", sys.cols()},
          {"A", a},                  {"T", t},            {"column_map", sys.column_map}};
}

KnapsackSystem system_from_json(const nlohmann::json& j) {
  const auto k = j.at("k").get<std::size_t>();
  const auto n = j.at("n").get<std::size_t>();
  const auto& a = j.at("A");
  const auto& t = j.at("T");
  if (a.size() != k * n || t.size() != k) throw ParameterError("system_from_json: size mismatch");
  KnapsackSystem sys;
  sys.q = json_bigint(j.at("q"));
  if (sgn(sys.q) <= 0) throw ParameterError("system_from_json: q must be positive");
  std::vector<IntVector> rows(k, IntVector(n));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t c = 0; c < n; ++c) rows[i][c] = mod_q(json_bigint(a[i * n + c]), sys.q);
    sys.t.push_back(mod_q(json_bigint(t[i]), sys.q));
  }
  sys.a = k == 0 ? IntMatrix(0, n) : IntMatrix(std::move(rows));
  if (j.contains("column_map")) {
    sys.column_map = j.at("column_map").get<std::vector<int>>();
  } else {
    sys.column_map.resize(n);
    std::iota(sys.column_map.begin(), sys.column_map.end(), 0);
  }
  if (sys.column_map.size() != n) throw ParameterError("system_from_json: column_map length mismatch");
  return sys;
}

}  // namespace ntruknap
