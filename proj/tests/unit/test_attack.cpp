#include <gtest/gtest.h>

#include <cmath>

#include "ntruknap/attack.hpp"
#include "ntruknap/errors.hpp"
#include "oracles.hpp"

using namespace ntruknap;

namespace {

AttackConfig toy_config(int k1, int k2, std::uint64_t seed, const char* name = "toy61") {
  auto params = NtruParams::by_name(name);
  return AttackConfig{params,
                      ScalingParams::from_exponent(BigInt(1), BigInt(static_cast<long>(params.q)), "2"),
                      LeakMode::prefix,
                      k1,
                      k2,
                      app_value_for(params.n),
                      nullptr,
                      seed};
}

// c == 3 h*r' + m' (mod q), evaluated with the naive convolution.
bool sound(const AttackInstance& inst, const TernaryPoly& r, const IntegerPoly& m) {
  const Coeff q = inst.params.q;
  std::vector<Coeff> hv(inst.h.coeffs().begin(), inst.h.coeffs().end());
  std::vector<Coeff> rv;
  for (int v : r.coeffs()) rv.push_back((v + q) % q);
  auto hr = oracle::naive_conv(hv, rv, q);
  for (int i = 0; i < inst.params.n; ++i) {
    Coeff rhs = ((3 * hr[static_cast<std::size_t>(i)] + m[i]) % q + q) % q;
    if (rhs != inst.c[i]) return false;
  }
  return true;
}

IntegerBasis basis_of(const std::vector<std::vector<long>>& rows) { return IntegerBasis{IntMatrix::from_int64(rows), {}}; }

}  // namespace

TEST(AppValue, TabulatedAndDerived) {
  EXPECT_EQ(app_value_for(509), 19);
  EXPECT_EQ(app_value_for(677), 21);
  EXPECT_EQ(app_value_for(821), 24);
  EXPECT_EQ(app_value_for(61), 8);
  for (int n : {1, 2, 3, 11, 101, 1000, 1499}) {
    EXPECT_EQ(app_value_for(n), static_cast<int>(std::ceil(std::sqrt(2.0 * n / 3.0))) + 1) << n;
  }
  EXPECT_THROW(app_value_for(0), ParameterError);
}

TEST(AttackConfig, Validation) {
  auto cfg = toy_config(52, 0, 1);
  EXPECT_NO_THROW(cfg.validate());
  cfg.k1 = 0;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg.k1 = 62;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg.k1 = 30;
  cfg.k2 = 61;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg.k2 = 0;
  cfg.app_value = 0;
  EXPECT_THROW(cfg.validate(), ParameterError);
}

TEST(MakeLeak, PrefixAndRandomPositions) {
  Rng rng(61);
  TernaryPoly m = sample_fixed_weight(61, 15, 15, rng);
  TernaryPoly r = sample_ternary(61, rng);
  LeakProfile p = make_leak(m, r, LeakMode::prefix, 10, 5, rng);
  ASSERT_EQ(p.known_m.size(), 10u);
  ASSERT_EQ(p.known_r.size(), 5u);
  EXPECT_EQ(p.known_m.begin()->first, 0);
  EXPECT_EQ(p.known_m.rbegin()->first, 9);
  EXPECT_EQ(p.known_r.rbegin()->first, 4);
  LeakProfile q = make_leak(m, r, LeakMode::random, 20, 20, rng);
  ASSERT_EQ(q.known_m.size(), 20u);
  for (auto [pos, v] : q.known_m) EXPECT_EQ(v, m[pos]);
  for (auto [pos, v] : q.known_r) EXPECT_EQ(v, r[pos]);
  EXPECT_THROW(make_leak(m, r, LeakMode::prefix, 62, 0, rng), ParameterError);
  EXPECT_EQ(leak_mode_from_string("random"), LeakMode::random);
  EXPECT_THROW(leak_mode_from_string("middle"), ParameterError);
}

TEST(ExtractCandidates, NormalizesSignAndScale) {
  // n' = 3, k = 1; marker column 3
  IntegerBasis b = basis_of({{-2, 0, 2, -2, 0}, {1, 1, 0, 0, 5}, {2, 4, 0, 1, 0}, {0, 0, 0, 0, 7}, {0, 0, 1, 0, 1}});
  std::vector<ScanEntry> trace;
  auto c = extract_candidates(b, ScalingParams(BigInt(1), BigInt(5)), 3, &trace);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0], (std::vector<BigInt>{BigInt(1), BigInt(0), BigInt(-1)}));
  ASSERT_EQ(trace.size(), 2u);  // row 1 has marker 0
  EXPECT_EQ(trace[0].row, 0u);
  EXPECT_EQ(trace[0].quotient, -2);
  EXPECT_EQ(trace[0].gcd, 2);
  EXPECT_TRUE(trace[0].candidate);
  EXPECT_EQ(trace[1].row, 2u);
  EXPECT_FALSE(trace[1].candidate);  // gcd 2 != |1|
}

TEST(ExtractCandidates, MarkerMustBeMultipleOfN1) {
  IntegerBasis b = basis_of({{1, 0, 0, 2, 0}, {0, 1, 0, 3, 0}, {0, 1, 1, -3, 0}, {0, 0, 0, 1, 0}, {0, 0, 0, 0, 1}});
  auto c = extract_candidates(b, ScalingParams(BigInt(3), BigInt(5)), 3);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0], (std::vector<BigInt>{BigInt(0), BigInt(1), BigInt(0)}));
  EXPECT_EQ(c[1], (std::vector<BigInt>{BigInt(0), BigInt(-1), BigInt(-1)}));
}

TEST(RecoverMessage, ToyInstancesRecoverThePlaintext) {
  for (std::uint64_t seed : {1u, 2u}) {
    auto cfg = toy_config(52, 0, seed);
    GeneratedInstance gen = generate_instance(cfg);
    AttackOutcome out = recover_message(cfg, gen.instance);
    ASSERT_TRUE(out.recovered()) << "seed " << seed;
    EXPECT_EQ(*out.nonce, gen.r);
    EXPECT_EQ(*out.message, gen.m.to_integer());
    EXPECT_TRUE(sound(gen.instance, *out.nonce, *out.message));
    EXPECT_GT(out.times.reduce, 0.0);
    int accepted = 0;
    for (const auto& s : out.trace) {
      if (!s.accepted) continue;
      ++accepted;
      EXPECT_TRUE(s.candidate && s.ternary && s.within_norm && s.satisfies_system);
    }
    EXPECT_EQ(accepted, 1);
  }
}

TEST(RecoverMessage, RandomPositionLeak) {
  auto cfg = toy_config(45, 0, 9);
  cfg.mode = LeakMode::random;
  GeneratedInstance gen = generate_instance(cfg);
  AttackOutcome out = recover_message(cfg, gen.instance);
  ASSERT_TRUE(out.recovered());
  EXPECT_EQ(*out.message, gen.m.to_integer());
}

TEST(RecoverMessage, FarBelowThresholdFindsNothing) {
  int found = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto cfg = toy_config(15, 0, seed);
    GeneratedInstance gen = generate_instance(cfg);
    AttackOutcome out = recover_message(cfg, gen.instance);
    if (out.recovered()) {
      ++found;
      // whatever is accepted still passes the gate
      EXPECT_TRUE(sound(gen.instance, *out.nonce, *out.message));
    }
  }
  EXPECT_LE(found, 1);
}

TEST(RecoverMessage, AcceptedNoncesBelongToTheSolutionSet) {
  auto params = NtruParams::make(11, 64, 1, "tiny11");
  int recovered = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    AttackConfig cfg{params, ScalingParams(BigInt(1), BigInt(4096)), LeakMode::random, 4, 0, app_value_for(11),
                     nullptr, seed};
    GeneratedInstance gen = generate_instance(cfg);
    AttackOutcome out = recover_message(cfg, gen.instance);
    KnapsackSystem sys = build_system(gen.instance.c, gen.instance.h, gen.instance.leak, params);
    auto sols = brute_force_solve(sys);
    ASSERT_NE(std::find(sols.begin(), sols.end(), std::vector<int>(gen.r.coeffs().begin(), gen.r.coeffs().end())),
              sols.end());
    if (!out.recovered()) continue;
    ++recovered;
    std::vector<int> r(out.nonce->coeffs().begin(), out.nonce->coeffs().end());
    EXPECT_NE(std::find(sols.begin(), sols.end(), r), sols.end());
    EXPECT_TRUE(sound(gen.instance, *out.nonce, *out.message));
  }
  EXPECT_GT(recovered, 0);
}

TEST(RecoverMessage, RejectsNonceLeaks) {
  auto cfg = toy_config(30, 5, 1);
  GeneratedInstance gen = generate_instance(cfg);
  EXPECT_THROW(recover_message(cfg, gen.instance), ParameterError);
}

TEST(RecoverMessage, ReducerFailurePropagatesWithContext) {
  auto cfg = toy_config(30, 0, 1);
  cfg.reducer = make_reducer("external:/nonexistent/reducer");
  GeneratedInstance gen = generate_instance(cfg);
  try {
    recover_message(cfg, gen.instance);
    FAIL() << "expected ExternalToolError";
  } catch (const ExternalToolError& e) {
    EXPECT_NE(std::string(e.what()).find("attack: reduction failed"), std::string::npos);
  }
}

TEST(RecoverMessageAlt, NoNonceLeakMatchesFirstAlgorithm) {
  auto cfg = toy_config(40, 0, 3);
  GeneratedInstance gen = generate_instance(cfg);
  PreparedAttack a = prepare_attack(cfg, gen.instance);
  PreparedAttack b = prepare_attack_alt(cfg, gen.instance);
  EXPECT_EQ(a.basis.rows, b.basis.rows);
  EXPECT_EQ(a.system, b.system);
  AttackOutcome oa = recover_message(cfg, gen.instance);
  AttackOutcome ob = recover_message_alt(cfg, gen.instance);
  EXPECT_EQ(oa.status, ob.status);
  EXPECT_EQ(oa.nonce, ob.nonce);
  EXPECT_EQ(oa.message, ob.message);
  EXPECT_EQ(oa.trace.size(), ob.trace.size());
}

TEST(RecoverMessageAlt, ToyInstancesRecoverThePlaintext) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto cfg = toy_config(28, 27, seed);
    GeneratedInstance gen = generate_instance(cfg);
    PreparedAttack prep = prepare_attack_alt(cfg, gen.instance);
    EXPECT_EQ(prep.basis.rows.rows(), 61u - 27u + 28u + 1u);
    AttackOutcome out = recover_message_alt(cfg, gen.instance);
    ASSERT_TRUE(out.recovered()) << "seed " << seed;
    EXPECT_EQ(*out.nonce, gen.r);
    EXPECT_EQ(*out.message, gen.m.to_integer());
    EXPECT_TRUE(sound(gen.instance, *out.nonce, *out.message));
  }
}

TEST(RecoverMessageAlt, RandomPositionsOnLargerToy) {
  auto cfg = toy_config(45, 45, 4, "toy101");
  cfg.mode = LeakMode::random;
  GeneratedInstance gen = generate_instance(cfg);
  AttackOutcome out = recover_message_alt(cfg, gen.instance);
  ASSERT_TRUE(out.recovered());
  EXPECT_EQ(*out.message, gen.m.to_integer());
}

TEST(ReconstructMessage, InvertsEncryption) {
  auto params = NtruParams::by_name("toy61");
  Rng rng(62);
  KeyPair k = keygen(params, rng);
  TernaryPoly m = sample_message(params, rng);
  TernaryPoly r = sample_nonce(params, rng);
  Ciphertext ct = encrypt(k.h, m, r, params);
  EXPECT_EQ(reconstruct_message(ct.c, k.h, r), m.to_integer());
}
