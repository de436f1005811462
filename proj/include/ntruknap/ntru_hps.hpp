#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ntruknap/poly_ring.hpp"
#include "ntruknap/rng.hpp"

namespace ntruknap {

// Public parameters (N, q, d). Construction validates: N prime, q a power of
// two coprime to 3 and N, 2d <= N - 1, and the decryption margin 8d < q/2
// (|3 r*g + f*m| <= 3*2d + 2d for ternary f, r).
struct NtruParams {
  std::string name;
  int n = 0;
  Coeff q = 0;
  int d = 0;

  static NtruParams make(int n, Coeff q, int d, std::string name = {});

  // Registered sets: hps2048509, hps2048677, hps4096821, toy61, toy101.
  static NtruParams by_name(std::string_view name);
  static const std::vector<NtruParams>& registered();

  friend bool operator==(const NtruParams&, const NtruParams&) = default;
};

struct KeyPair {
  TernaryPoly f;
  TernaryPoly g;
  ModPoly fq;  // f^-1 mod q
  ModPoly f3;  // f^-1 mod 3
  ModPoly h;   // fq * g mod q
};

struct Ciphertext {
  ModPoly c;
  // Generator-side ground truth, carried for experiments and tests only. The
  // attack never reads these.
  std::optional<TernaryPoly> m;
  std::optional<TernaryPoly> r;
};

// Resamples f until it is invertible mod q and mod 3.
// Throws GenerationError after max_attempts failures.
KeyPair keygen(const NtruParams& params, Rng& rng, int max_attempts = 100);

// m drawn from T_{N-2}(d, d).
TernaryPoly sample_message(const NtruParams& params, Rng& rng);
// r drawn from T_{N-2}.
TernaryPoly sample_nonce(const NtruParams& params, Rng& rng);

// c = 3 r*h + m mod q. Throws ParameterError unless m is in T_{N-2}(d, d) and
// r in T_{N-2}.
Ciphertext encrypt(const ModPoly& h, const TernaryPoly& m, const TernaryPoly& r,
                   const NtruParams& params);

TernaryPoly decrypt(const Ciphertext& ct, const KeyPair& keys, const NtruParams& params);

// JSON documents: {"N","q","d", coefficient arrays}. ModPoly arrays hold the
// canonical [0, q) residues; ternary arrays hold -1/0/1.
nlohmann::json params_to_json(const NtruParams& params);
NtruParams params_from_json(const nlohmann::json& j);
nlohmann::json key_to_json(const KeyPair& keys, const NtruParams& params);
KeyPair key_from_json(const nlohmann::json& j);
nlohmann::json ciphertext_to_json(const Ciphertext& ct, const NtruParams& params);
Ciphertext ciphertext_from_json(const nlohmann::json& j);

}  // namespace ntruknap
