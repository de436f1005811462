#pragma once

#include <map>
#include <span>
#include <vector>

#include <json.hpp>

#include "ntruknap/int_matrix.hpp"
#include "ntruknap/ntru_hps.hpp"
#include "ntruknap/poly_ring.hpp"

namespace ntruknap {

// Modular knapsack A x = T (mod q) with x in {-1,0,1}^n. Entries of A and T
// are canonical residues in [0, q). column_map[j] is the nonce coefficient
// index that column j stands for.
struct KnapsackSystem {
  IntMatrix a;
  IntVector t;
  BigInt q;
  std::vector<int> column_map;

  std::size_t rows() const { return a.rows(); }
  std::size_t cols() const { return a.cols(); }

  friend bool operator==(const KnapsackSystem&, const KnapsackSystem&) = default;
};

// Leaked coefficients by position: m-leaks and r-leaks, values in {-1,0,1}.
struct LeakProfile {
  std::map<int, int> known_m;
  std::map<int, int> known_r;
};

// a_i = 3^-1 (c_i - m_i) mod q for every leaked index i, ascending.
std::vector<Coeff> target_entries(const ModPoly& c, const std::map<int, int>& known_m);

// Row for index l is (h_l, h_{l-1}, ..., h_{l-(N-1)}) with indices mod N, so
// that row_l . r is the coefficient of x^l in h*r.
IntMatrix circulant_rows(const ModPoly& h, std::span<const int> indices);

// System of the m-leaks alone (k2 must be zero). The true nonce satisfies it.
// Throws ParameterError on an empty or malformed leak.
KnapsackSystem build_system(const ModPoly& c, const ModPoly& h, const LeakProfile& leak,
                            const NtruParams& params);

// Drops the columns of known nonce coefficients and moves their contribution
// to the right-hand side: T_z = T - sum_{r_i=1} col_i + sum_{r_i=-1} col_i.
KnapsackSystem reduce_system_with_known_r(const KnapsackSystem& sys,
                                          const std::map<int, int>& known_r);

// Every x in {-1,0,1}^n with A x = T (mod q), in lexicographic order with
// -1 < 0 < 1. Refuses (ParameterError) when n > limit.
std::vector<std::vector<int>> brute_force_solve(const KnapsackSystem& sys, std::size_t limit = 16);

// True iff x is ternary and A x = T (mod q). Throws on a length mismatch.
bool verify_solution(const KnapsackSystem& sys, std::span<const int> x);

nlohmann::json system_to_json(const KnapsackSystem& sys);
KnapsackSystem system_from_json(const nlohmann::json& j);

}  // namespace ntruknap
