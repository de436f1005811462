#include "ntruknap/ntru_hps.hpp"

#include <string>

#include "ntruknap/errors.hpp"

namespace ntruknap {

namespace {

using nlohmann::json;

std::vector<Coeff> coeff_array(const json& j, const char* key) {
  if (!j.contains(key)) throw ParameterError(std::string("missing field '") + key + "'");
  return j.at(key).get<std::vector<Coeff>>();
}

TernaryPoly ternary_field(const json& j, const char* key) {
  if (!j.contains(key)) throw ParameterError(std::string("missing field '") + key + "'");
  return TernaryPoly(j.at(key).get<std::vector<int>>());
}

ModPoly mod_field(const json& j, const char* key, Coeff modulus, int n) {
  auto c = coeff_array(j, key);
  if (static_cast<int>(c.size()) != n) {
    throw ParameterError(std::string("field '") + key + "' has wrong length");
  }
  for (Coeff v : c) {
    if (v < 0 || v >= modulus) {
      throw ParameterError(std::string("field '") + key + "' is not in canonical form");
    }
  }
  return ModPoly(std::move(c), modulus);
}

std::vector<Coeff> to_vector(const ModPoly& p) { return {p.coeffs().begin(), p.coeffs().end()}; }
std::vector<int> to_vector(const TernaryPoly& p) { return {p.coeffs().begin(), p.coeffs().end()}; }

}  // namespace

NtruParams NtruParams::make(int n, Coeff q, int d, std::string name) {
  if (!is_prime(n)) throw ParameterError("NtruParams: N must be prime");
  if (!is_power_of_two(q) || q < 4) throw ParameterError("NtruParams: q must be a power of two");
  if (n == 2) throw ParameterError("NtruParams: gcd(q, N) must be 1");
  if (d < 0 || 2 * d > n - 1) throw ParameterError("NtruParams: need 0 <= 2d <= N - 1");
  if (8 * static_cast<Coeff>(d) >= q / 2) {
    throw ParameterError("NtruParams: decryption margin 3*2d + 2d < q/2 violated");
  }
  if (name.empty()) name = "N" + std::to_string(n) + "q" + std::to_string(q);
  return NtruParams{std::move(name), n, q, d};
}

const std::vector<NtruParams>& NtruParams::registered() {
  static const std::vector<NtruParams> sets = {
      make(509, 2048, 127, "hps2048509"),
      make(677, 2048, 127, "hps2048677"),
      make(821, 4096, 255, "hps4096821"),
      make(61, 256, 15, "toy61"),
      make(101, 512, 31, "toy101"),
  };
  return sets;
}

NtruParams NtruParams::by_name(std::string_view name) {
  for (const auto& p : registered()) {
    if (p.name == name) return p;
  }
  throw ParameterError("unknown parameter set '" + std::string(name) + "'");
}

KeyPair keygen(const NtruParams& params, Rng& rng, int max_attempts) {
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    TernaryPoly f = sample_ternary(params.n, rng);
    auto fq = invert_poly(f.to_mod(params.q));
    if (!fq) continue;
    auto f3 = invert_poly(f.to_mod(3));
    if (!f3) continue;
    TernaryPoly g = sample_fixed_weight(params.n, params.d, params.d, rng);
    ModPoly h = conv_mod(*fq, g.to_mod(params.q));
    return KeyPair{std::move(f), std::move(g), std::move(*fq), std::move(*f3), std::move(h)};
  }
  throw GenerationError("keygen: no invertible f after " + std::to_string(max_attempts) + " attempts");
}

TernaryPoly sample_message(const NtruParams& params, Rng& rng) {
  return sample_fixed_weight(params.n, params.d, params.d, rng);
}

TernaryPoly sample_nonce(const NtruParams& params, Rng& rng) { return sample_ternary(params.n, rng); }

Ciphertext encrypt(const ModPoly& h, const TernaryPoly& m, const TernaryPoly& r,
                   const NtruParams& params) {
  if (h.size() != params.n || m.size() != params.n || r.size() != params.n) {
    throw ParameterError("encrypt: polynomial length differs from N");
  }
  if (h.modulus() != params.q) throw ParameterError("encrypt: public key modulus differs from q");
  if (!m.has_weights(params.d, params.d) || !m.degree_below_top()) {
    throw ParameterError("encrypt: message not in T_{N-2}(d, d)");
  }
  if (!r.degree_below_top()) throw ParameterError("encrypt: nonce not in T_{N-2}");
  ModPoly c = conv_mod(r.to_mod(params.q), h).scaled(3) + m.to_mod(params.q);
  return Ciphertext{std::move(c), m, r};
}

TernaryPoly decrypt(const Ciphertext& ct, const KeyPair& keys, const NtruParams& params) {
  ModPoly v = conv_mod(keys.f.to_mod(params.q), ct.c);
  ModPoly v3 = centerlift(v).reduce(3);
  IntegerPoly b = centerlift(conv_mod(keys.f3, v3));
  return TernaryPoly(std::vector<int>(b.coeffs().begin(), b.coeffs().end()));
}

json params_to_json(const NtruParams& params) {
  return json{{"name", params.name}, {"N", params.n}, {"q", params.q}, {"d", params.d}};
}

NtruParams params_from_json(const json& j) {
  return NtruParams::make(j.at("N").get<int>(), j.at("q").get<Coeff>(), j.at("d").get<int>(),
                          j.value("name", std::string{}));
}

json key_to_json(const KeyPair& keys, const NtruParams& params) {
  json j = params_to_json(params);
  j["f"] = to_vector(keys.f);
  j["g"] = to_vector(keys.g);
  j["Fq"] = to_vector(keys.fq);
  j["F3"] = to_vector(keys.f3);
  j["h"] = to_vector(keys.h);
  return j;
}

KeyPair key_from_json(const json& j) {
  const NtruParams params = params_from_json(j);
  KeyPair keys{ternary_field(j, "f"), ternary_field(j, "g"), mod_field(j, "Fq", params.q, params.n),
               mod_field(j, "F3", 3, params.n), mod_field(j, "h", params.q, params.n)};
  if (keys.f.size() != params.n || keys.g.size() != params.n) {
    throw ParameterError("key: f or g has wrong length");
  }
  return keys;
}

json ciphertext_to_json(const Ciphertext& ct, const NtruParams& params) {
  json j = params_to_json(params);
  j["c"] = to_vector(ct.c);
  if (ct.m) j["m"] = to_vector(*ct.m);
  if (ct.r) j["r"] = to_vector(*ct.r);
  return j;
}

Ciphertext ciphertext_from_json(const json& j) {
  const NtruParams params = params_from_json(j);
  Ciphertext ct{mod_field(j, "c", params.q, params.n), std::nullopt, std::nullopt};
  if (j.contains("m")) ct.m = ternary_field(j, "m");
  if (j.contains("r")) ct.r = ternary_field(j, "r");
  return ct;
}

}  // namespace ntruknap
