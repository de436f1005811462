#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ntruknap/knapsack.hpp"
#include "ntruknap/lattice_embed.hpp"
#include "ntruknap/ntru_hps.hpp"
#include "ntruknap/reduction.hpp"

namespace ntruknap {

// Where leaked coefficients sit: the first k positions, or k positions drawn
// uniformly without replacement.
enum class LeakMode { prefix, random };

std::string_view to_string(LeakMode mode);
LeakMode leak_mode_from_string(std::string_view text);

struct AttackConfig {
  NtruParams params;
  ScalingParams scale;
  LeakMode mode = LeakMode::prefix;
  int k1 = 0;  // leaked message coefficients
  int k2 = 0;  // leaked nonce coefficients
  int app_value = 0;
  // Null means the internal LLL with delta = 3/4.
  std::shared_ptr<const Reducer> reducer;
  std::uint64_t seed = 0;

  // Throws ParameterError unless 1 <= k1 <= N, 0 <= k2 < N, app_value > 0.
  void validate() const;
};

// Tabulated values for the standard sets, else ceil(sqrt(2N/3)) + 1.
int app_value_for(int n);

// What the attacker sees.
struct AttackInstance {
  NtruParams params;
  ModPoly h;
  ModPoly c;
  LeakProfile leak;
};

// An instance together with the plaintext and nonce it was made from.
struct GeneratedInstance {
  AttackInstance instance;
  KeyPair keys;
  TernaryPoly m;
  TernaryPoly r;
};

// Leak k1 coefficients of m and k2 of r.
LeakProfile make_leak(const TernaryPoly& m, const TernaryPoly& r, LeakMode mode, int k1, int k2, Rng& rng);

// Fresh key, message, nonce and leak, all from cfg.seed.
GeneratedInstance generate_instance(const AttackConfig& cfg);

struct ScanEntry {
  std::size_t row = 0;
  BigInt quotient;
  BigInt gcd;
  BigInt squared_norm;  // of the normalized candidate, 0 when none was formed
  bool candidate = false;
  bool ternary = false;
  bool within_norm = false;
  bool satisfies_system = false;
  bool accepted = false;
};

struct PhaseTimes {
  double build = 0.0;
  double reduce = 0.0;
  double extract = 0.0;
};

enum class AttackStatus { recovered, not_found };

struct AttackOutcome {
  AttackStatus status = AttackStatus::not_found;
  std::optional<TernaryPoly> nonce;
  std::optional<IntegerPoly> message;
  std::vector<ScanEntry> trace;
  PhaseTimes times;
  std::string reducer_log;

  bool recovered() const { return status == AttackStatus::recovered; }
};

// Rows i in [0, n') whose marker entry is a nonzero multiple of n1 and whose
// first n' entries have gcd equal to |marker / n1|, divided by that quotient.
// Rows are scanned in order; `trace`, when given, receives one entry per row
// that passed the marker test.
std::vector<std::vector<BigInt>> extract_candidates(const IntegerBasis& reduced, const ScalingParams& scale,
                                                    std::size_t n_prime, std::vector<ScanEntry>* trace = nullptr);

// Everything built before reduction.
struct PreparedAttack {
  KnapsackSystem original;  // from the message leaks alone
  KnapsackSystem system;    // what the lattice encodes (original minus known r)
  IntegerBasis basis;
};

PreparedAttack prepare_attack(const AttackConfig& cfg, const AttackInstance& instance);
PreparedAttack prepare_attack_alt(const AttackConfig& cfg, const AttackInstance& instance);

// m' = centerlift((c - 3 h*r') mod q)
IntegerPoly reconstruct_message(const ModPoly& c, const ModPoly& h, const TernaryPoly& r);

// Algorithm with message leaks only (k2 must be 0).
AttackOutcome recover_message(const AttackConfig& cfg, const AttackInstance& instance);

// Variant that also uses leaked nonce coefficients to shrink the lattice.
AttackOutcome recover_message_alt(const AttackConfig& cfg, const AttackInstance& instance);

}  // namespace ntruknap
