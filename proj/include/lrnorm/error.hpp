#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace lrnorm {

// Process exit codes shared by the C API and the CLI.
enum class ErrorCode : int {
  kOk = 0,
  kParameter = 1,
  kNumerical = 2,
  kInvariant = 3,
  kInternal = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Violated precondition or inconsistent configuration.
class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what) : Error(ErrorCode::kParameter, what) {}
};

/// Observation grid too coarse for the requested bandwidth.
class ResolutionError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

/// Estimator called with an exponent it does not handle (e.g. even r on the non-even path).
class ModeError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

/// Iterative method failed; carries the residual of the last iterate.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double residual = 0.0,
                 std::vector<double> last_iterate = {})
      : Error(ErrorCode::kNumerical, what), residual_(residual),
        last_iterate_(std::move(last_iterate)) {}
  double residual() const noexcept { return residual_; }
  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }

 private:
  double residual_;
  std::vector<double> last_iterate_;
};

/// Hermite recurrence exceeded the overflow guard at `degree`.
class SaturationError : public NumericalError {
 public:
  SaturationError(const std::string& what, int degree)
      : NumericalError(what), degree_(degree) {}
  int degree() const noexcept { return degree_; }

 private:
  int degree_;
};

class CalibrationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Broken internal contract (e.g. an LP that must be feasible is not).
class InternalError : public Error {
 public:
  explicit InternalError(const std::string& what) : Error(ErrorCode::kInternal, what) {}
};

// Throws ParameterError with `what` when `cond` is false.
void require(bool cond, const std::string& what);

}  // namespace lrnorm
