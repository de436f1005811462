#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ntruknap/attack.hpp"
#include "ntruknap/errors.hpp"
#include "ntruknap/harness.hpp"
#include "ntruknap/snf.hpp"

using namespace ntruknap;
using nlohmann::json;

namespace {

enum Exit : int { kOk = 0, kNotFound = 1, kUsage = 2, kExternal = 3, kFailure = 4 };

std::string read_text(const std::string& path) {
  if (path.empty() || path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), {});
  }
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot read " + path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ParameterError("cannot write " + path);
  out << text;
}

json big_json(const BigInt& v) {
  if (v.fits_slong_p()) return v.get_si();
  return v.get_str();
}

json matrix_json(const IntMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (const auto& v : m.row(i)) row.push_back(big_json(v));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <typename Span>
json int_array(const Span& values) {
  json out = json::array();
  for (auto v : values) out.push_back(v);
  return out;
}

// "1-9" or "1,2,5"
std::vector<std::string> expand_grid(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    auto dash = part.find('-', 1);
    if (dash == std::string::npos) {
      out.push_back(part);
      continue;
    }
    long lo = std::stol(part.substr(0, dash));
    long hi = std::stol(part.substr(dash + 1));
    if (hi < lo) throw ParameterError("empty grid range " + part);
    for (long v = lo; v <= hi; ++v) out.push_back(std::to_string(v));
  }
  if (out.empty()) throw ParameterError("empty grid");
  return out;
}

// Every subcommand accepts --config FILE with key = value lines. They are
// spliced in right after the subcommand name so that flags given on the
// command line (parsed later, last one wins) override them.
std::vector<std::string> splice_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::vector<std::string> rest;
  std::vector<std::string> from_file;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw CLI::ArgumentMismatch("--config needs a file");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
      continue;
    }
    for (const auto& [key, value] : parse_config_text(read_text(path))) from_file.push_back("--" + key + "=" + value);
  }
  if (!from_file.empty() && !rest.empty()) rest.insert(rest.begin() + 1, from_file.begin(), from_file.end());
  return rest;
}

struct AttackOptions {
  std::string params = "toy61";
  int k1 = 0;
  int k2 = 0;
  std::string n1;
  std::string x;
  std::string mode = "prefix";
  int app_value = 0;
  std::uint64_t seed = 0;
  std::string reducer = "internal";
  std::string delta = "3/4";
  long timeout = 1800;
  std::string key_file;
  std::string ct_file;
  std::string out;
};

void add_attack_options(CLI::App* cmd, AttackOptions& o, bool alt) {
  cmd->add_option("--params", o.params, "parameter set name")->capture_default_str();
  cmd->add_option("--k1", o.k1, "leaked message coefficients")->required();
  if (alt) cmd->add_option("--k2", o.k2, "leaked nonce coefficients")->capture_default_str();
  cmd->add_option("--n1", o.n1, "marker weight N1 (default: calibrated/published value)");
  cmd->add_option("--x", o.x, "N2 = ceil(q^x); decimal x allowed");
  cmd->add_option("--mode", o.mode, "leak positions: prefix or random")->capture_default_str();
  cmd->add_option("--app-value", o.app_value, "norm bound (0: derived from N)")->capture_default_str();
  cmd->add_option("--seed", o.seed, "instance seed")->capture_default_str();
  cmd->add_option("--reducer", o.reducer, "internal | external:<command>")->capture_default_str();
  cmd->add_option("--delta", o.delta, "LLL parameter of the internal reducer")->capture_default_str();
  cmd->add_option("--timeout", o.timeout, "external reducer timeout in seconds")->capture_default_str();
  cmd->add_option("--key", o.key_file, "key JSON (with --ciphertext: attack this instance)");
  cmd->add_option("--ciphertext", o.ct_file, "ciphertext JSON carrying m and r for the leak");
  cmd->add_option("--out", o.out, "write the result record here");
}

int run_attack_command(const AttackOptions& o, bool alt) {
  NtruParams params = NtruParams::by_name(o.params);
  DefaultScaling scaling = default_scaling(params);
  BigInt n1 = o.n1.empty() ? scaling.n1 : BigInt(o.n1);
  std::string x = o.x.empty() ? scaling.x : o.x;
  const BigInt q(static_cast<long>(params.q));

  AttackConfig cfg{params,
                   ScalingParams::from_exponent(n1, q, x),
                   leak_mode_from_string(o.mode),
                   o.k1,
                   o.k2,
                   o.app_value > 0 ? o.app_value : app_value_for(params.n),
                   make_reducer(o.reducer, parse_rational(o.delta), std::chrono::seconds(o.timeout)),
                   o.seed};
  cfg.validate();

  std::optional<TernaryPoly> truth;
  std::optional<AttackInstance> instance;
  if (!o.key_file.empty() || !o.ct_file.empty()) {
    if (o.key_file.empty() || o.ct_file.empty()) throw ParameterError("--key and --ciphertext go together");
    KeyPair keys = key_from_json(json::parse(read_text(o.key_file)));
    Ciphertext ct = ciphertext_from_json(json::parse(read_text(o.ct_file)));
    if (!ct.m || !ct.r) throw ParameterError("ciphertext file lacks m and r, so no leak can be simulated");
    Rng rng(o.seed);
    instance = AttackInstance{params, keys.h, ct.c, make_leak(*ct.m, *ct.r, cfg.mode, cfg.k1, cfg.k2, rng)};
    truth = ct.m;
  } else {
    GeneratedInstance gen = generate_instance(cfg);
    instance = gen.instance;
    truth = gen.m;
  }

  AttackOutcome out = alt ? recover_message_alt(cfg, *instance) : recover_message(cfg, *instance);

  json trace = json::array();
  for (const auto& s : out.trace) {
    trace.push_back(json{{"row", s.row},
                         {"quotient", big_json(s.quotient)},
                         {"gcd", big_json(s.gcd)},
                         {"squared_norm", big_json(s.squared_norm)},
                         {"candidate", s.candidate},
                         {"ternary", s.ternary},
                         {"within_norm", s.within_norm},
                         {"satisfies_system", s.satisfies_system},
                         {"accepted", s.accepted}});
  }
  json record{{"algorithm", alt ? 2 : 1},
              {"params", params_to_json(params)},
              {"n1", n1.get_str()},
              {"x", x},
              {"n2", cfg.scale.n2.get_str()},
              {"k1", cfg.k1},
              {"k2", cfg.k2},
              {"mode", std::string(to_string(cfg.mode))},
              {"app_value", cfg.app_value},
              {"seed", o.seed},
              {"reducer", cfg.reducer->description()},
              {"status", out.recovered() ? "recovered" : "not-found"},
              {"nonce", out.nonce ? int_array(out.nonce->coeffs()) : json(nullptr)},
              {"message", out.message ? int_array(out.message->coeffs()) : json(nullptr)},
              {"success", out.message && truth && *out.message == truth->to_integer()},
              {"times", {{"build", out.times.build}, {"reduce", out.times.reduce}, {"extract", out.times.extract}}},
              {"trace", trace}};
  if (!out.reducer_log.empty()) record["reducer_log"] = out.reducer_log;
  write_text(o.out, record.dump(2) + "\n");
  return out.recovered() ? kOk : kNotFound;
}

// Options shared by experiment and calibrate, kept as strings and handed to
// experiment_config_from_pairs.
struct ExperimentOptions {
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, CLI::Option*>> options;

  void add(CLI::App* cmd, const std::string& key, const std::string& help) {
    options.emplace_back(key, cmd->add_option("--" + key, values[key], help));
  }
  std::map<std::string, std::string> given() const {
    std::map<std::string, std::string> out;
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) out[key] = values.at(key);
    }
    return out;
  }
};

void add_experiment_options(CLI::App* cmd, ExperimentOptions& o, bool with_scaling) {
  o.add(cmd, "params", "parameter set name (default toy61)");
  o.add(cmd, "n", "explicit N");
  o.add(cmd, "q", "explicit q");
  o.add(cmd, "d", "explicit d");
  if (with_scaling) {
    o.add(cmd, "n1", "marker weight N1");
    o.add(cmd, "x", "N2 = ceil(q^x)");
  }
  o.add(cmd, "k1", "leaked message coefficients");
  o.add(cmd, "k2", "leaked nonce coefficients");
  o.add(cmd, "mode", "prefix | random");
  o.add(cmd, "algorithm", "1 (message leaks) or 2 (message and nonce leaks)");
  o.add(cmd, "app-value", "norm bound (0: derived from N)");
  o.add(cmd, "trials", "trials per configuration");
  o.add(cmd, "seed", "master seed");
  o.add(cmd, "reducer", "internal | external:<command>");
  o.add(cmd, "delta", "LLL parameter of the internal reducer");
  o.add(cmd, "timeout", "external reducer timeout per call, seconds");
  o.add(cmd, "workers", "concurrent trials");
}

std::map<std::string, std::string> table_pairs(const TableRow& row) {
  return {{"params", row.params},
          {"n1", row.n1.get_str()},
          {"x", row.x},
          {"k1", std::to_string(row.k1)},
          {"k2", std::to_string(row.k2)},
          {"algorithm", std::to_string(row.table)},
          {"trials", "10"}};
}

int run(int argc, char** argv) {
  CLI::App app{"NTRU-HPS message recovery from partial leakage via a modular knapsack lattice", "ntruknap"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_help_all_flag("--help-all", "help for every subcommand");

  // keygen
  auto* keygen_cmd = app.add_subcommand("keygen", "generate a key pair");
  std::string kg_params = "toy61";
  std::uint64_t kg_seed = 0;
  std::string kg_out;
  keygen_cmd->add_option("--params", kg_params, "parameter set name")->capture_default_str();
  keygen_cmd->add_option("--seed", kg_seed, "seed")->capture_default_str();
  keygen_cmd->add_option("--out", kg_out, "output file");

  // encrypt
  auto* encrypt_cmd = app.add_subcommand("encrypt", "encrypt a random message (m and r are kept in the output)");
  std::string enc_key;
  std::uint64_t enc_seed = 0;
  std::string enc_out;
  encrypt_cmd->add_option("--key", enc_key, "key JSON")->required();
  encrypt_cmd->add_option("--seed", enc_seed, "seed")->capture_default_str();
  encrypt_cmd->add_option("--out", enc_out, "output file");

  // decrypt
  auto* decrypt_cmd = app.add_subcommand("decrypt", "decrypt a ciphertext");
  std::string dec_key;
  std::string dec_ct;
  std::string dec_out;
  decrypt_cmd->add_option("--key", dec_key, "key JSON")->required();
  decrypt_cmd->add_option("--ciphertext", dec_ct, "ciphertext JSON")->required();
  decrypt_cmd->add_option("--out", dec_out, "output file");

  AttackOptions attack_opts;
  auto* attack_cmd = app.add_subcommand("attack", "message recovery from leaked message coefficients");
  add_attack_options(attack_cmd, attack_opts, false);
  AttackOptions alt_opts;
  auto* alt_cmd = app.add_subcommand("attack-alt", "message recovery from leaked message and nonce coefficients");
  add_attack_options(alt_cmd, alt_opts, true);

  // reduce
  auto* reduce_cmd = app.add_subcommand("reduce", "reduce a basis given as [[a b ...] ...]");
  std::string red_in = "-";
  std::string red_out;
  std::string red_reducer = "internal";
  std::string red_delta = "3/4";
  long red_timeout = 1800;
  bool red_profile = false;
  reduce_cmd->add_option("--in", red_in, "input matrix (- for stdin)")->capture_default_str();
  reduce_cmd->add_option("--out", red_out, "output matrix (default stdout)");
  reduce_cmd->add_option("--reducer", red_reducer, "internal | external:<command>")->capture_default_str();
  reduce_cmd->add_option("--delta", red_delta, "LLL parameter")->capture_default_str();
  reduce_cmd->add_option("--timeout", red_timeout, "external timeout, seconds")->capture_default_str();
  reduce_cmd->add_flag("--profile", red_profile, "print the Gram-Schmidt log profile and drop to stderr");

  // snf
  auto* snf_cmd = app.add_subcommand("snf", "Smith normal form and integer kernel of a matrix");
  std::string snf_in = "-";
  std::string snf_out;
  snf_cmd->add_option("--in", snf_in, "input matrix (- for stdin)")->capture_default_str();
  snf_cmd->add_option("--out", snf_out, "output file");

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "run seeded trials and print a table-style summary row");
  ExperimentOptions exp_opts;
  add_experiment_options(exp_cmd, exp_opts, true);
  int exp_table = 0;
  int exp_row = 0;
  std::string exp_out;
  bool exp_no_times = false;
  exp_cmd->add_option("--table", exp_table, "published table (1 or 2) to take the row from");
  exp_cmd->add_option("--row", exp_row, "row within --table, 1-based");
  exp_cmd->add_option("--out", exp_out, "JSON Lines output (default stdout)");
  exp_cmd->add_flag("--no-times", exp_no_times, "leave wall times out of the records");

  // calibrate
  auto* cal_cmd = app.add_subcommand("calibrate", "grid search over (N1, x)");
  ExperimentOptions cal_opts;
  add_experiment_options(cal_cmd, cal_opts, false);
  std::string cal_n1 = "1-9";
  std::string cal_x = "2-20";
  std::string cal_out;
  cal_cmd->add_option("--n1-grid", cal_n1, "N1 values, e.g. 1-9 or 1,3,9")->capture_default_str();
  cal_cmd->add_option("--x-grid", cal_x, "x values, e.g. 2-20 or 2,2.5,3")->capture_default_str();
  cal_cmd->add_option("--out", cal_out, "calibration table JSON (default stdout)");

  if (argc < 2) {
    std::cerr << app.help();
    return kUsage;
  }
  std::vector<std::string> args = splice_config(argc, argv);
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << "\n" << app.help();
    return kUsage;
  }

  if (*keygen_cmd) {
    NtruParams params = NtruParams::by_name(kg_params);
    Rng rng(kg_seed);
    write_text(kg_out, key_to_json(keygen(params, rng), params).dump(2) + "\n");
    return kOk;
  }
  if (*encrypt_cmd) {
    json kj = json::parse(read_text(enc_key));
    NtruParams params = params_from_json(kj);
    KeyPair keys = key_from_json(kj);
    Rng rng(enc_seed);
    TernaryPoly m = sample_message(params, rng);
    TernaryPoly r = sample_nonce(params, rng);
    write_text(enc_out, ciphertext_to_json(encrypt(keys.h, m, r, params), params).dump(2) + "\n");
    return kOk;
  }
  if (*decrypt_cmd) {
    json kj = json::parse(read_text(dec_key));
    NtruParams params = params_from_json(kj);
    KeyPair keys = key_from_json(kj);
    Ciphertext ct = ciphertext_from_json(json::parse(read_text(dec_ct)));
    TernaryPoly m = decrypt(ct, keys, params);
    write_text(dec_out, json{{"m", int_array(m.coeffs())}}.dump() + "\n");
    return kOk;
  }
  if (*attack_cmd) return run_attack_command(attack_opts, false);
  if (*alt_cmd) return run_attack_command(alt_opts, true);
  if (*reduce_cmd) {
    IntMatrix b = parse_matrix(read_text(red_in));
    auto reducer = make_reducer(red_reducer, parse_rational(red_delta), std::chrono::seconds(red_timeout));
    ReductionRun out = reducer->run(b);
    if (red_profile) {
      BasisProfile p = basis_profile(out.basis);
      std::cerr << "log_norms";
      for (double l : p.log_norms) std::cerr << ' ' << l;
      std::cerr << "\ndrop " << p.drop << '\n';
    }
    write_text(red_out, format_matrix(out.basis));
    return kOk;
  }
  if (*snf_cmd) {
    IntMatrix a = parse_matrix(read_text(snf_in));
    SnfDecomposition snf = smith_normal_form(a);
    json divisors = json::array();
    for (const auto& d : snf.divisors) divisors.push_back(big_json(d));
    json kernel = json::array();
    for (const auto& v : kernel_basis(snf)) {
      json col = json::array();
      for (const auto& e : v) col.push_back(big_json(e));
      kernel.push_back(std::move(col));
    }
    json out{{"rank", snf.rank()},   {"divisors", divisors},     {"D", matrix_json(snf.d)},
             {"P", matrix_json(snf.p)}, {"Q", matrix_json(snf.q)}, {"kernel", kernel}};
    write_text(snf_out, out.dump(2) + "\n");
    return kOk;
  }
  if (*exp_cmd) {
    std::map<std::string, std::string> pairs;
    if (exp_table != 0 || exp_row != 0) pairs = table_pairs(table_row(exp_table, exp_row));
    for (const auto& [k, v] : exp_opts.given()) pairs[k] = v;
    ExperimentConfig cfg = experiment_config_from_pairs(pairs);
    ExperimentSummary summary;
    if (exp_out.empty() || exp_out == "-") {
      summary = run_experiment(cfg, &std::cout, !exp_no_times);
    } else {
      std::ofstream out(exp_out);
      if (!out) throw ParameterError("cannot write " + exp_out);
      summary = run_experiment(cfg, &out, !exp_no_times);
    }
    std::cerr << format_summary_row(cfg, summary) << '\n';
    for (const auto& rec : summary.records) {
      if (rec.status == TrialStatus::error) std::cerr << "trial " << rec.trial << ": " << rec.error << '\n';
    }
    return kOk;
  }
  if (*cal_cmd) {
    ExperimentConfig base = experiment_config_from_pairs(cal_opts.given());
    std::vector<BigInt> n1_grid;
    for (const auto& v : expand_grid(cal_n1)) n1_grid.emplace_back(v);
    CalibrationResult result = calibrate(base, n1_grid, expand_grid(cal_x), &std::cerr);
    write_text(cal_out, result.to_json().dump(2) + "\n");
    return kOk;
  }
  return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ExternalToolError& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (!e.captured_output().empty()) std::cerr << e.captured_output() << '\n';
    return kExternal;
  } catch (const IntegrityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExternal;
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const json::exception& e) {
    std::cerr << "error: malformed JSON input: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
