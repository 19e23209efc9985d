#include "vfc/error.hpp"

namespace vfc {

std::string_view to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::config: return "config";
    case ErrorCategory::contract: return "contract";
    case ErrorCategory::fixed_point: return "fixed-point";
    case ErrorCategory::convergence: return "convergence";
    case ErrorCategory::io: return "io";
  }
  return "unknown";
}

ConfigError::ConfigError(const std::string& what, int line)
    : Error(ErrorCategory::config,
            line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

}  // namespace vfc
