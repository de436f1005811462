#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ntruknap/int_matrix.hpp"

namespace ntruknap {

inline Rational default_delta() { return Rational(3, 4); }

// LLL reduction of the rows of b. A floating-point pass (long double
// Gram-Schmidt fed from an exactly maintained integer Gram matrix) does the
// bulk of the work; an exact integral pass then finishes, so the result
// always satisfies check_reduced(result, delta) exactly. Only unimodular
// integer row operations are applied.
// Requires 1/4 < delta <= 1; throws ReductionError on dependent rows.
IntMatrix lll_reduce(const IntMatrix& b, const Rational& delta = default_delta());

// Integral LLL with exact integer Gram-Schmidt data throughout (no floating
// point at all). Slow on large inputs; lll_reduce uses it as its last step.
IntMatrix lll_reduce_exact(const IntMatrix& b, const Rational& delta = default_delta());

// Size reduction |mu_ij| <= 1/2 and the Lovasz condition
// |b_i*|^2 >= (delta - mu_{i,i-1}^2) |b_{i-1}*|^2, checked in exact
// arithmetic. Returns false for dependent rows.
bool check_reduced(const IntMatrix& b, const Rational& delta = default_delta());

// Exact |b_i*|^2 for every row. Throws ReductionError on dependent rows.
std::vector<Rational> gram_schmidt_squared_norms(const IntMatrix& b);

struct BasisProfile {
  std::vector<Rational> squared_norms;  // exact |b_i*|^2
  std::vector<double> log_norms;        // l_i = ln |b_i*|
  double drop = 0.0;                    // sum over descents of l_i - l_{i+1}
};

BasisProfile basis_profile(const IntMatrix& b);

// Outcome of one reduction call; `log` carries tool diagnostics (command line,
// captured stderr) for experiment records.
struct ReductionRun {
  IntMatrix basis;
  std::string log;
};

class Reducer {
 public:
  virtual ~Reducer() = default;

  virtual ReductionRun run(const IntMatrix& basis) const = 0;
  // "internal" or "external"
  virtual std::string name() const = 0;
  // Parameters as they should be echoed in experiment output.
  virtual std::string description() const = 0;

  IntMatrix reduce(const IntMatrix& basis) const { return run(basis).basis; }
};

class InternalLllReducer final : public Reducer {
 public:
  explicit InternalLllReducer(Rational delta = default_delta());

  ReductionRun run(const IntMatrix& basis) const override;
  std::string name() const override { return "internal"; }
  std::string description() const override;

 private:
  Rational delta_;
};

// Drives an external reduction executable. The command template is run by
// /bin/sh; "{in}" and "{out}" are replaced with temp-file paths. Without
// "{in}" the matrix is fed on stdin, without "{out}" the result is read from
// stdout. The output must generate the same lattice as the input.
class ExternalReducer final : public Reducer {
 public:
  ExternalReducer(std::string command_template, std::chrono::milliseconds timeout);

  ReductionRun run(const IntMatrix& basis) const override;
  std::string name() const override { return "external"; }
  std::string description() const override { return command_; }

 private:
  std::string command_;
  std::chrono::milliseconds timeout_;
};

// Runs `command` on b (see ExternalReducer). Throws ExternalToolError when the
// process cannot run, exits non-zero, times out or prints an unparsable
// matrix; IntegrityError when the result is not a basis of the same lattice.
ReductionRun external_reduce(const IntMatrix& b, const std::string& command,
                             std::chrono::milliseconds timeout);

// Same lattice test used on external output: equal |det|, plus membership of
// sampled rows in both directions.
void verify_same_lattice(const IntMatrix& input, const IntMatrix& output, std::size_t spot_checks = 8);

// "internal" or "external:<command>".
std::shared_ptr<const Reducer> make_reducer(std::string_view spec, const Rational& delta = default_delta(),
                                            std::chrono::milliseconds timeout = std::chrono::minutes(30));

}  // namespace ntruknap
