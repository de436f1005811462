#pragma once

#include <stdexcept>
#include <string>

namespace ntruknap {

// Invalid sizes, moduli, weights or other caller-supplied parameters.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Key generation gave up after too many non-invertible samples.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Basis reduction could not proceed, e.g. linearly dependent rows.
class ReductionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An external reducer process failed, timed out or could not be started.
class ExternalToolError : public std::runtime_error {
 public:
  ExternalToolError(const std::string& what, std::string captured)
      : std::runtime_error(what), captured_output_(std::move(captured)) {}

  const std::string& captured_output() const { return captured_output_; }

 private:
  std::string captured_output_;
};

// A reducer returned something that does not generate the input lattice.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ntruknap
