#include "ntruknap/attack.hpp"

#include <chrono>
#include <cmath>

#include "ntruknap/errors.hpp"

namespace ntruknap {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::shared_ptr<const Reducer> reducer_or_default(const AttackConfig& cfg) {
  if (cfg.reducer) return cfg.reducer;
  return std::make_shared<InternalLllReducer>();
}

std::map<int, int> leak_values(const TernaryPoly& p, const std::vector<int>& positions) {
  std::map<int, int> out;
  for (int pos : positions) out[pos] = p[pos];
  return out;
}

std::vector<int> leak_positions(int n, int count, LeakMode mode, Rng& rng) {
  if (mode == LeakMode::random) return rng.sample_positions(n, count);
  std::vector<int> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = i;
  return out;
}

ReductionRun run_reducer(const Reducer& reducer, const IntMatrix& basis) {
  try {
    return reducer.run(basis);
  } catch (const ExternalToolError& e) {
    throw ExternalToolError(std::string("attack: reduction failed: ") + e.what(), e.captured_output());
  } catch (const IntegrityError& e) {
    throw IntegrityError(std::string("attack: reduction failed: ") + e.what());
  } catch (const ReductionError& e) {
    throw ReductionError(std::string("attack: reduction failed: ") + e.what());
  }
}

// Shared tail of both algorithms. `lift` turns a candidate over the lattice
// unknowns into a full-length nonce.
template <typename Lift>
AttackOutcome run_attack(const AttackConfig& cfg, const AttackInstance& instance, PreparedAttack prepared,
                         Clock::time_point build_start, Lift lift) {
  AttackOutcome out;
  out.times.build = seconds_since(build_start);

  auto reduce_start = Clock::now();
  ReductionRun run = run_reducer(*reducer_or_default(cfg), prepared.basis.rows);
  out.times.reduce = seconds_since(reduce_start);
  out.reducer_log = std::move(run.log);

  auto extract_start = Clock::now();
  IntegerBasis reduced{std::move(run.basis), prepared.basis.layout};
  const std::size_t n_prime = prepared.system.cols();
  auto candidates = extract_candidates(reduced, cfg.scale, n_prime, &out.trace);

  const long bound = static_cast<long>(cfg.app_value) * cfg.app_value;
  std::size_t entry = 0;
  for (const auto& cand : candidates) {
    while (!out.trace[entry].candidate) ++entry;
    ScanEntry& scan = out.trace[entry++];

    bool ternary = true;
    for (const auto& v : cand) ternary = ternary && v >= -1 && v <= 1;
    scan.ternary = ternary;
    scan.within_norm = scan.squared_norm <= bound;
    if (!ternary) continue;

    std::vector<int> values;
    for (const auto& v : cand) values.push_back(static_cast<int>(v.get_si()));
    std::vector<int> full = lift(values);
    scan.satisfies_system = verify_solution(prepared.original, full);
    if (!scan.within_norm || !scan.satisfies_system || out.recovered()) continue;

    scan.accepted = true;
    out.status = AttackStatus::recovered;
    out.nonce = TernaryPoly(full);
    out.message = reconstruct_message(instance.c, instance.h, *out.nonce);
  }
  out.times.extract = seconds_since(extract_start);
  return out;
}

}  // namespace

std::string_view to_string(LeakMode mode) { return mode == LeakMode::prefix ? "prefix" : "random"; }

LeakMode leak_mode_from_string(std::string_view text) {
  if (text == "prefix") return LeakMode::prefix;
  if (text == "random") return LeakMode::random;
  throw ParameterError("unknown leak mode: " + std::string(text));
}

void AttackConfig::validate() const {
  if (k1 < 1 || k1 > params.n) throw ParameterError("attack: k1 must lie in [1, N]");
  if (k2 < 0 || k2 >= params.n) throw ParameterError("attack: k2 must lie in [0, N)");
  if (app_value <= 0) throw ParameterError("attack: app_value must be positive");
}

int app_value_for(int n) {
  if (n < 1) throw ParameterError("app_value_for: N must be positive");
  switch (n) {
    case 509: return 19;
    case 677: return 21;
    case 821: return 24;
    default: break;
  }
  // ceil(sqrt(2n/3)) without floating point: smallest s with 3 s^2 >= 2n.
  long s = static_cast<long>(std::sqrt(2.0 * n / 3.0));
  while (3 * s * s < 2L * n) ++s;
  while (s > 0 && 3 * (s - 1) * (s - 1) >= 2L * n) --s;
  return static_cast<int>(s) + 1;
}

LeakProfile make_leak(const TernaryPoly& m, const TernaryPoly& r, LeakMode mode, int k1, int k2, Rng& rng) {
  const int n = m.size();
  if (r.size() != n) throw ParameterError("make_leak: m and r differ in length");
  if (k1 < 0 || k1 > n || k2 < 0 || k2 > n) throw ParameterError("make_leak: leak size out of range");
  LeakProfile leak;
  leak.known_m = leak_values(m, leak_positions(n, k1, mode, rng));
  leak.known_r = leak_values(r, leak_positions(n, k2, mode, rng));
  return leak;
}

GeneratedInstance generate_instance(const AttackConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  KeyPair keys = keygen(cfg.params, rng);
  TernaryPoly m = sample_message(cfg.params, rng);
  TernaryPoly r = sample_nonce(cfg.params, rng);
  Ciphertext ct = encrypt(keys.h, m, r, cfg.params);
  LeakProfile leak = make_leak(m, r, cfg.mode, cfg.k1, cfg.k2, rng);
  AttackInstance inst{cfg.params, keys.h, ct.c, std::move(leak)};
  return GeneratedInstance{std::move(inst), std::move(keys), std::move(m), std::move(r)};
}

std::vector<std::vector<BigInt>> extract_candidates(const IntegerBasis& reduced, const ScalingParams& scale,
                                                    std::size_t n_prime, std::vector<ScanEntry>* trace) {
  const IntMatrix& b = reduced.rows;
  if (b.cols() <= n_prime) throw ParameterError("extract_candidates: basis too narrow for n'");
  std::vector<std::vector<BigInt>> out;
  const std::size_t rows = std::min(n_prime, b.rows());
  for (std::size_t i = 0; i < rows; ++i) {
    const BigInt& marker = b(i, n_prime);
    if (sgn(marker) == 0 || !mpz_divisible_p(marker.get_mpz_t(), scale.n1.get_mpz_t())) continue;
    ScanEntry scan;
    scan.row = i;
    scan.quotient = marker / scale.n1;
    std::span<const BigInt> row(b.row(i).data(), n_prime);
    scan.gcd = content(row);
    if (scan.gcd == abs(scan.quotient)) {
      std::vector<BigInt> cand(row.begin(), row.end());
      for (auto& v : cand) v /= scan.quotient;
      scan.candidate = true;
      scan.squared_norm = squared_norm(cand);
      out.push_back(std::move(cand));
    }
    if (trace) trace->push_back(std::move(scan));
  }
  return out;
}

PreparedAttack prepare_attack(const AttackConfig& cfg, const AttackInstance& instance) {
  cfg.validate();
  if (cfg.k2 != 0) throw ParameterError("recover_message: nonce leaks need the alternative attack");
  KnapsackSystem sys = build_system(instance.c, instance.h, instance.leak, instance.params);
  IntegerBasis basis = build_bk(sys, cfg.scale);
  return PreparedAttack{sys, sys, std::move(basis)};
}

PreparedAttack prepare_attack_alt(const AttackConfig& cfg, const AttackInstance& instance) {
  cfg.validate();
  KnapsackSystem original = build_system(instance.c, instance.h, instance.leak, instance.params);
  KnapsackSystem reduced = reduce_system_with_known_r(original, instance.leak.known_r);
  IntegerBasis basis = build_bz(reduced, cfg.scale);
  return PreparedAttack{std::move(original), std::move(reduced), std::move(basis)};
}

IntegerPoly reconstruct_message(const ModPoly& c, const ModPoly& h, const TernaryPoly& r) {
  ModPoly masked = conv_mod(h, r.to_mod(c.modulus())).scaled(3);
  return centerlift(c - masked);
}

AttackOutcome recover_message(const AttackConfig& cfg, const AttackInstance& instance) {
  auto start = Clock::now();
  PreparedAttack prepared = prepare_attack(cfg, instance);
  return run_attack(cfg, instance, std::move(prepared), start, [](const std::vector<int>& x) { return x; });
}

AttackOutcome recover_message_alt(const AttackConfig& cfg, const AttackInstance& instance) {
  auto start = Clock::now();
  PreparedAttack prepared = prepare_attack_alt(cfg, instance);
  const std::vector<int> column_map = prepared.system.column_map;
  const auto& known_r = instance.leak.known_r;
  const int n = instance.params.n;
  return run_attack(cfg, instance, std::move(prepared), start, [&](const std::vector<int>& x) {
    std::vector<int> full(static_cast<std::size_t>(n), 0);
    for (auto [pos, value] : known_r) full[static_cast<std::size_t>(pos)] = value;
    for (std::size_t j = 0; j < x.size(); ++j) full[static_cast<std::size_t>(column_map[j])] = x[j];
    return full;
  });
}

}  // namespace ntruknap
