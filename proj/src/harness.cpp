#include "ntruknap/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <condition_variable>
#include <cstdio>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "ntruknap/errors.hpp"

namespace ntruknap {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ParameterError("config: bad value for " + key + ": " + value);
  }
  return out;
}

BigInt parse_bigint(const std::string& key, const std::string& value) {
  BigInt out;
  if (value.empty() || out.set_str(value, 10) != 0) throw ParameterError("config: bad value for " + key + ": " + value);
  return out;
}

std::string format_seconds(double s) {
  char buf[32];
  if (s >= 60.0) {
    std::snprintf(buf, sizeof buf, "%.1fm", s / 60.0);
  } else {
    std::snprintf(buf, sizeof buf, "%.2fs", s);
  }
  return buf;
}

double x_value(const std::string& x) { return std::stod(x); }

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string s = trim(text);
  Rational out;
  auto dot = s.find('.');
  if (dot == std::string::npos) {
    if (s.empty() || out.set_str(s, 10) != 0) throw ParameterError("bad rational: " + s);
    out.canonicalize();
    if (out.get_den() == 0) throw ParameterError("bad rational: " + s);
    return out;
  }
  std::string digits = s.substr(0, dot) + s.substr(dot + 1);
  std::string den = "1" + std::string(s.size() - dot - 1, '0');
  if (digits.empty() || digits == "-" || out.set_str(digits + "/" + den, 10) != 0) {
    throw ParameterError("bad rational: " + s);
  }
  out.canonicalize();
  return out;
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw ParameterError("experiment: trials must be at least 1");
  if (workers < 1) throw ParameterError("experiment: workers must be at least 1");
  if (algorithm != 1 && algorithm != 2) throw ParameterError("experiment: algorithm must be 1 or 2");
  if (algorithm == 1 && k2 != 0) throw ParameterError("experiment: algorithm 1 takes no nonce leaks");
  if (timeout.count() <= 0) throw ParameterError("experiment: timeout must be positive");
  attack_config(seed).validate();
}

int ExperimentConfig::effective_app_value() const { return app_value > 0 ? app_value : app_value_for(params.n); }

double ExperimentConfig::percentage() const {
  if (algorithm == 1) return 100.0 * k1 / params.n;
  return 100.0 * (k1 + k2) / (2.0 * params.n);
}

AttackConfig ExperimentConfig::attack_config(std::uint64_t trial_seed) const {
  return AttackConfig{params,
                      ScalingParams::from_exponent(n1, BigInt(static_cast<long>(params.q)), x),
                      mode,
                      k1,
                      k2,
                      effective_app_value(),
                      nullptr,
                      trial_seed};
}

nlohmann::json ExperimentConfig::to_json() const {
  return nlohmann::json{{"params", params_to_json(params)},
                        {"n1", n1.get_str()},
                        {"x", x},
                        {"n2", ceil_power(BigInt(static_cast<long>(params.q)), x).get_str()},
                        {"k1", k1},
                        {"k2", k2},
                        {"mode", std::string(to_string(mode))},
                        {"algorithm", algorithm},
                        {"app_value", effective_app_value()},
                        {"trials", trials},
                        {"seed", seed},
                        {"reducer", reducer},
                        {"delta", delta.get_str()},
                        {"timeout_s", timeout.count()},
                        {"workers", workers}};
}

std::map<std::string, std::string> parse_config_text(std::string_view text) {
  std::map<std::string, std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) throw ParameterError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw ParameterError("config line " + std::to_string(lineno) + ": empty key");
    out[key] = trim(t.substr(eq + 1));
  }
  return out;
}

ExperimentConfig experiment_config_from_pairs(const std::map<std::string, std::string>& pairs) {
  static const std::vector<std::string> known = {"params", "n",     "q",         "d",         "n1",
                                                 "x",      "k1",    "k2",        "mode",      "algorithm",
                                                 "app-value", "trials", "seed",   "reducer",   "delta",
                                                 "timeout", "workers"};
  for (const auto& [key, value] : pairs) {
    if (std::find(known.begin(), known.end(), key) == known.end()) throw ParameterError("config: unknown key " + key);
  }
  auto get = [&](const std::string& key) -> const std::string* {
    auto it = pairs.find(key);
    return it == pairs.end() ? nullptr : &it->second;
  };

  ExperimentConfig cfg;
  cfg.params = NtruParams::by_name(get("params") ? *get("params") : "toy61");
  if (get("n") || get("q") || get("d")) {
    int n = get("n") ? parse_number<int>("n", *get("n")) : cfg.params.n;
    Coeff q = get("q") ? parse_number<Coeff>("q", *get("q")) : cfg.params.q;
    int d = get("d") ? parse_number<int>("d", *get("d")) : cfg.params.d;
    cfg.params = NtruParams::make(n, q, d);
  }
  DefaultScaling scaling = default_scaling(cfg.params);
  cfg.n1 = scaling.n1;
  cfg.x = scaling.x;
  if (auto v = get("n1")) cfg.n1 = parse_bigint("n1", *v);
  if (auto v = get("x")) cfg.x = *v;
  if (auto v = get("k1")) cfg.k1 = parse_number<int>("k1", *v);
  if (auto v = get("k2")) cfg.k2 = parse_number<int>("k2", *v);
  if (auto v = get("mode")) cfg.mode = leak_mode_from_string(*v);
  if (auto v = get("algorithm")) cfg.algorithm = parse_number<int>("algorithm", *v);
  if (auto v = get("app-value")) cfg.app_value = parse_number<int>("app-value", *v);
  if (auto v = get("trials")) cfg.trials = parse_number<int>("trials", *v);
  if (auto v = get("seed")) cfg.seed = parse_number<std::uint64_t>("seed", *v);
  if (auto v = get("reducer")) cfg.reducer = *v;
  if (auto v = get("delta")) cfg.delta = parse_rational(*v);
  if (auto v = get("timeout")) cfg.timeout = std::chrono::seconds(parse_number<long>("timeout", *v));
  if (auto v = get("workers")) cfg.workers = parse_number<int>("workers", *v);
  return cfg;
}

std::string_view to_string(TrialStatus status) {
  switch (status) {
    case TrialStatus::recovered: return "recovered";
    case TrialStatus::not_found: return "not-found";
    case TrialStatus::error: return "error";
  }
  return "error";
}

nlohmann::json TrialRecord::to_json(bool include_times) const {
  nlohmann::json j{{"trial", trial},
                   {"seed", seed},
                   {"status", std::string(to_string(status))},
                   {"success", success},
                   {"marker_rows", marker_rows},
                   {"candidates", candidates},
                   {"accepted_rows", accepted_rows},
                   {"verified_rows", verified_rows}};
  if (!error.empty()) j["error"] = error;
  if (include_times) {
    j["times"] = {{"build", times.build}, {"reduce", times.reduce}, {"extract", times.extract}};
  }
  return j;
}

nlohmann::json ExperimentSummary::to_json() const {
  return nlohmann::json{{"type", "summary"},      {"trials", trials},         {"successes", successes},
                        {"rate", success_rate},    {"mean_time_s", mean_time}, {"percentage", percentage}};
}

static TrialRecord run_trial(const ExperimentConfig& cfg, int index, std::uint64_t trial_seed,
                      const std::shared_ptr<const Reducer>& reducer) {
  TrialRecord rec;
  rec.trial = index;
  rec.seed = trial_seed;
  try {
    AttackConfig acfg = cfg.attack_config(trial_seed);
    acfg.reducer = reducer;
    GeneratedInstance gen = generate_instance(acfg);
    AttackOutcome out = cfg.algorithm == 1 ? recover_message(acfg, gen.instance) : recover_message_alt(acfg, gen.instance);
    rec.status = out.recovered() ? TrialStatus::recovered : TrialStatus::not_found;
    rec.times = out.times;
    rec.marker_rows = out.trace.size();
    for (const auto& scan : out.trace) {
      if (scan.candidate) ++rec.candidates;
      if (scan.accepted) rec.accepted_rows.push_back(scan.row);
      if (scan.ternary && scan.within_norm && scan.satisfies_system) rec.verified_rows.push_back(scan.row);
    }
    rec.success = out.message && *out.message == gen.m.to_integer();
  } catch (const std::exception& e) {
    rec.status = TrialStatus::error;
    rec.error = e.what();
  }
  return rec;
}

TrialRecord run_trial(const ExperimentConfig& cfg, int index, std::uint64_t trial_seed) {
  return run_trial(cfg, index, trial_seed, make_reducer(cfg.reducer, cfg.delta, cfg.timeout));
}

nlohmann::json experiment_header(const ExperimentConfig& cfg) {
  return nlohmann::json{
      {"type", "header"},
      {"config", cfg.to_json()},
      {"seed_derivation",
       "trial i uses seed mix64(seed ^ mix64(i + 0x9e3779b97f4a7c15)) where mix64 is the splitmix64 finalizer; "
       "the trial seed drives an mt19937_64 that samples key, message, nonce and leak positions in that order"}};
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg, std::ostream* jsonl, bool include_times) {
  cfg.validate();
  auto reducer = make_reducer(cfg.reducer, cfg.delta, std::chrono::duration_cast<std::chrono::milliseconds>(cfg.timeout));
  if (jsonl) *jsonl << experiment_header(cfg).dump() << '\n' << std::flush;

  const int n = cfg.trials;
  std::vector<std::optional<TrialRecord>> slots(static_cast<std::size_t>(n));
  std::mutex mu;
  std::condition_variable ready;
  std::atomic<int> next{0};

  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      TrialRecord rec = run_trial(cfg, i, derive_seed(cfg.seed, static_cast<std::uint64_t>(i)), reducer);
      {
        std::lock_guard lock(mu);
        slots[static_cast<std::size_t>(i)] = std::move(rec);
      }
      ready.notify_all();
    }
  };
  std::vector<std::jthread> pool;
  for (int w = 0; w < std::min(cfg.workers, n); ++w) pool.emplace_back(worker);

  // Single writer, trial order.
  ExperimentSummary summary;
  for (int i = 0; i < n; ++i) {
    std::unique_lock lock(mu);
    ready.wait(lock, [&] { return slots[static_cast<std::size_t>(i)].has_value(); });
    TrialRecord rec = *slots[static_cast<std::size_t>(i)];
    lock.unlock();
    if (jsonl) *jsonl << rec.to_json(include_times).dump() << '\n' << std::flush;
    summary.records.push_back(std::move(rec));
  }
  pool.clear();

  summary.trials = n;
  double total = 0.0;
  for (const auto& rec : summary.records) {
    if (rec.success) ++summary.successes;
    total += rec.total_time();
  }
  summary.success_rate = static_cast<double>(summary.successes) / n;
  summary.mean_time = total / n;
  summary.percentage = cfg.percentage();
  if (jsonl) {
    nlohmann::json tail = summary.to_json();
    if (!include_times) tail.erase("mean_time_s");
    *jsonl << tail.dump() << '\n' << std::flush;
  }
  return summary;
}

std::string format_summary_row(const ExperimentConfig& cfg, const ExperimentSummary& summary) {
  std::ostringstream os;
  os << "(" << cfg.params.n << ", " << cfg.params.q << ") | " << cfg.n1.get_str() << " | " << cfg.x << " | ";
  if (cfg.algorithm == 1) {
    os << cfg.k1;
  } else {
    os << cfg.k1 << " | " << cfg.k2 << " | " << cfg.k1 + cfg.k2;
  }
  char pct[16];
  std::snprintf(pct, sizeof pct, "%.0f%%", summary.percentage);
  char rate[16];
  std::snprintf(rate, sizeof rate, "%.0f%%", 100.0 * summary.success_rate);
  os << " | " << pct << " | " << format_seconds(summary.mean_time) << " | " << rate;
  return os.str();
}

nlohmann::json CalibrationResult::to_json() const {
  auto point = [](const CalibrationPoint& p) {
    return nlohmann::json{{"n1", p.n1.get_str()}, {"x", p.x},         {"successes", p.successes},
                          {"trials", p.trials},   {"rate", p.rate()}, {"mean_time_s", p.mean_time}};
  };
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& p : table) rows.push_back(point(p));
  nlohmann::json j{{"table", rows}};
  j["best"] = best ? point(*best) : nlohmann::json(nullptr);
  return j;
}

CalibrationResult calibrate(const ExperimentConfig& base, const std::vector<BigInt>& n1_grid,
                            const std::vector<std::string>& x_grid, std::ostream* log) {
  std::vector<std::string> xs = x_grid;
  std::stable_sort(xs.begin(), xs.end(), [](const auto& a, const auto& b) { return x_value(a) < x_value(b); });
  std::vector<BigInt> n1s = n1_grid;
  std::sort(n1s.begin(), n1s.end());

  CalibrationResult result;
  const BigInt q(static_cast<long>(base.params.q));
  for (const auto& x : xs) {
    const BigInt n2 = ceil_power(q, x);
    for (const auto& n1 : n1s) {
      if (n1 < 1 || n1 >= n2) continue;
      ExperimentConfig cfg = base;
      cfg.n1 = n1;
      cfg.x = x;
      ExperimentSummary summary = run_experiment(cfg);
      CalibrationPoint point{n1, x, summary.successes, summary.trials, summary.mean_time};
      if (log) {
        *log << "n1=" << n1.get_str() << " x=" << x << " rate=" << summary.successes << "/" << summary.trials
             << " mean=" << format_seconds(summary.mean_time) << '\n';
      }
      // Grid order is (x, n1) ascending, so a strict improvement keeps the
      // earliest point on ties.
      if (!result.best || point.successes * result.best->trials > result.best->successes * point.trials) {
        result.best = point;
      }
      result.table.push_back(std::move(point));
    }
  }
  return result;
}

DefaultScaling default_scaling(const NtruParams& params) {
  // toy values come from `ntruknap calibrate` runs recorded in the README.
  if (params.n == 61 && params.q == 256) return {BigInt(1), "2"};
  if (params.n == 101 && params.q == 512) return {BigInt(1), "2"};
  if (params.n == 509) return {BigInt(9), "8"};
  if (params.n == 677) return {BigInt(1), "15"};
  if (params.n == 821) return {BigInt(7), "21"};
  return {BigInt(1), "2"};
}

const std::vector<TableRow>& table_rows() {
  static const std::vector<TableRow> rows = [] {
    std::vector<TableRow> r;
    auto t1 = [&](int row, const char* set, long n1, const char* x, int k, int pct, const char* time, int rate) {
      r.push_back(TableRow{1, row, set, BigInt(n1), x, k, 0, pct, time, rate, false});
    };
    t1(1, "hps2048509", 9, "8", 425, 83, "5m", 100);
    t1(2, "hps2048677", 1, "15", 600, 89, "12m", 90);
    t1(3, "hps4096821", 7, "21", 750, 91, "17m", 50);
    int row = 0;
    auto t2 = [&](const char* set, long n1, const char* x, int k1, int k2, int pct, const char* time, int rate,
                  bool hl = false) {
      r.push_back(TableRow{2, ++row, set, BigInt(n1), x, k1, k2, pct, time, rate, hl});
    };
    t2("hps2048509", 9, "8", 300, 125, 42, "3m", 10);
    t2("hps2048509", 9, "8", 250, 185, 43, "3m", 0);
    t2("hps2048509", 9, "8", 300, 135, 43, "3m", 100, true);
    t2("hps2048509", 9, "8", 230, 215, 44, "2m", 50);
    t2("hps2048509", 9, "8", 250, 195, 44, "3m", 100);
    t2("hps2048509", 9, "8", 350, 100, 44, "3m", 100);
    t2("hps2048509", 9, "8", 230, 225, 45, "2m", 100);
    t2("hps2048677", 1, "15", 500, 100, 44, "10m", 10);
    t2("hps2048677", 1, "15", 400, 210, 45, "5m", 0);
    t2("hps2048677", 1, "15", 500, 110, 45, "10m", 90, true);
    t2("hps2048677", 1, "15", 400, 215, 45, "5m", 70);
    t2("hps2048677", 1, "15", 400, 220, 46, "5m", 10);
    t2("hps2048677", 1, "15", 315, 310, 46, "2m", 40);
    t2("hps2048677", 1, "15", 315, 315, 47, "2m", 60);
    t2("hps4096821", 7, "21", 700, 90, 48, "14m", 90, true);
    t2("hps4096821", 7, "21", 410, 400, 49, "2m", 0);
    t2("hps4096821", 7, "21", 500, 310, 49, "3m", 0);
    t2("hps4096821", 7, "21", 600, 210, 49, "5m", 10);
    t2("hps4096821", 7, "21", 410, 410, 50, "2m", 100);
    t2("hps4096821", 7, "21", 500, 320, 50, "3m", 100);
    t2("hps4096821", 7, "21", 600, 220, 50, "5m", 100);
    return r;
  }();
  return rows;
}

const TableRow& table_row(int table, int row) {
  for (const auto& r : table_rows()) {
    if (r.table == table && r.row == row) return r;
  }
  throw ParameterError("no row " + std::to_string(row) + " in table " + std::to_string(table));
}

ExperimentConfig config_for(const TableRow& row, int trials, std::uint64_t seed, const std::string& reducer) {
  ExperimentConfig cfg;
  cfg.params = NtruParams::by_name(row.params);
  cfg.n1 = row.n1;
  cfg.x = row.x;
  cfg.k1 = row.k1;
  cfg.k2 = row.k2;
  cfg.algorithm = row.table;
  cfg.trials = trials;
  cfg.seed = seed;
  cfg.reducer = reducer;
  return cfg;
}

}  // namespace ntruknap
