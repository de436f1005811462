#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ntruknap/attack.hpp"

namespace ntruknap {

struct ExperimentConfig {
  NtruParams params;
  BigInt n1 = 1;
  std::string x = "2";  // N2 = ceil(q^x)
  int k1 = 0;
  int k2 = 0;
  LeakMode mode = LeakMode::prefix;
  int algorithm = 1;  // 1: message leaks only, 2: message and nonce leaks
  int app_value = 0;  // 0 selects app_value_for(N)
  int trials = 1;
  std::uint64_t seed = 0;
  std::string reducer = "internal";
  Rational delta = default_delta();  // internal reducer only
  std::chrono::seconds timeout{1800};  // per external reducer call
  int workers = 1;

  // Throws ParameterError on inconsistent settings.
  void validate() const;
  int effective_app_value() const;
  // k/N*100 for algorithm 1, (k1+k2)/(2N)*100 for algorithm 2.
  double percentage() const;
  AttackConfig attack_config(std::uint64_t trial_seed) const;

  nlohmann::json to_json() const;
};

// Builds a config from key=value pairs (the same names as the CLI flags:
// params, n, q, d, n1, x, k1, k2, mode, algorithm, app-value, trials, seed,
// reducer, delta, timeout, workers). Unknown keys throw ParameterError.
ExperimentConfig experiment_config_from_pairs(const std::map<std::string, std::string>& pairs);

// Parses "key = value" lines; '#' starts a comment.
std::map<std::string, std::string> parse_config_text(std::string_view text);

// "3/4", "0.99" or "1".
Rational parse_rational(std::string_view text);

enum class TrialStatus { recovered, not_found, error };

std::string_view to_string(TrialStatus status);

struct TrialRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  TrialStatus status = TrialStatus::not_found;
  PhaseTimes times;
  std::size_t marker_rows = 0;  // rows passing the marker test
  std::size_t candidates = 0;   // rows passing the gcd test
  std::vector<std::size_t> accepted_rows;
  std::vector<std::size_t> verified_rows;  // candidates satisfying every check
  bool success = false;                    // m' equals the generator's m
  std::string error;

  double total_time() const { return times.build + times.reduce + times.extract; }
  // Wall times are left out when include_times is false; everything else is a
  // function of the config alone.
  nlohmann::json to_json(bool include_times = true) const;
};

struct ExperimentSummary {
  int trials = 0;
  int successes = 0;
  double success_rate = 0.0;
  double mean_time = 0.0;
  double percentage = 0.0;
  std::vector<TrialRecord> records;

  nlohmann::json to_json() const;
};

// One trial: instance from `trial_seed`, attack, compare with the plaintext.
TrialRecord run_trial(const ExperimentConfig& cfg, int index, std::uint64_t trial_seed);

// Header line describing the config and the sub-seed derivation.
nlohmann::json experiment_header(const ExperimentConfig& cfg);

// Trial i uses seed derive_seed(cfg.seed, i). Records go to `jsonl` (one JSON
// object per line, in trial order) as they complete.
ExperimentSummary run_experiment(const ExperimentConfig& cfg, std::ostream* jsonl = nullptr,
                                 bool include_times = true);

// "(N, q) | N1 | x | k | % | runtime | rate" in the layout of the tables.
std::string format_summary_row(const ExperimentConfig& cfg, const ExperimentSummary& summary);

struct CalibrationPoint {
  BigInt n1;
  std::string x;
  int successes = 0;
  int trials = 0;
  double mean_time = 0.0;

  double rate() const { return trials == 0 ? 0.0 : static_cast<double>(successes) / trials; }
};

struct CalibrationResult {
  std::vector<CalibrationPoint> table;
  std::optional<CalibrationPoint> best;

  nlohmann::json to_json() const;
};

// Grid search over (n1, x) with every other setting from `base`. Points with
// n1 >= ceil(q^x) are skipped. The best point maximizes the success rate;
// ties go to the smaller x, then the smaller n1 (cheaper reductions, and
// unlike measured runtime the choice is reproducible).
CalibrationResult calibrate(const ExperimentConfig& base, const std::vector<BigInt>& n1_grid,
                            const std::vector<std::string>& x_grid, std::ostream* log = nullptr);

// Scaling used when none is given: calibrated values for the toy sets, the
// published values for the standard ones.
struct DefaultScaling {
  BigInt n1;
  std::string x;
};
DefaultScaling default_scaling(const NtruParams& params);

// Rows of the published result tables.
struct TableRow {
  int table = 0;
  int row = 0;  // 1-based within the table
  std::string params;
  BigInt n1;
  std::string x;
  int k1 = 0;
  int k2 = 0;
  int percent = 0;  // leaked share as printed in the table
  std::string runtime;
  int rate_percent = 0;
  bool highlighted = false;
};

const std::vector<TableRow>& table_rows();
const TableRow& table_row(int table, int row);
ExperimentConfig config_for(const TableRow& row, int trials, std::uint64_t seed, const std::string& reducer);

}  // namespace ntruknap
