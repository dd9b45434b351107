#pragma once

#include <stdexcept>
#include <string>

namespace rsoc {

/// Base of every error raised by the library. `exit_code()` maps the error
/// class onto the CLI exit codes (1 validation, 2 solver).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 2; }
  virtual const char* kind() const noexcept { return "error"; }
};

/// Bad input: malformed config, out-of-range parameter, non-normalized weights.
class ValidationError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 1; }
  const char* kind() const noexcept override { return "validation"; }
};

/// Point outside the closed orthant.
class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
  const char* kind() const noexcept override { return "domain"; }
};

/// Numerical configuration that breaks a scheme requirement (e.g. the
/// monotonicity step bound).
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
  const char* kind() const noexcept override { return "config"; }
};

class SimulationError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "simulation"; }
};

class SolverError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "solver"; }
};

/// Query outside the tabulated (theta, x) range of a value field.
class InterpolationError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "interpolation"; }
};

}  // namespace rsoc
