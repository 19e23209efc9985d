#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vfc {

/// Broad failure class, used by the CLI to print a machine-parseable
/// category and pick an exit code.
enum class ErrorCategory { config, contract, fixed_point, convergence, io };

std::string_view to_string(ErrorCategory c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

/// Bad configuration file or parameter values. `line` is 0 when the
/// problem is not tied to a particular line.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, int line = 0);
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// A precondition of a model operation was violated (infeasible action,
/// malformed policy, ...).
class ContractViolation : public Error {
 public:
  explicit ContractViolation(const std::string& what)
      : Error(ErrorCategory::contract, what) {}
};

/// The DCF collision/transmission fixed point could not be located.
class FixedPointError : public Error {
 public:
  FixedPointError(const std::string& what, double residual)
      : Error(ErrorCategory::fixed_point, what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// An iterative solver ran out of its iteration budget.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> trace)
      : Error(ErrorCategory::convergence, what), trace_(std::move(trace)) {}
  const std::vector<double>& residual_trace() const noexcept { return trace_; }

 private:
  std::vector<double> trace_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

}  // namespace vfc
