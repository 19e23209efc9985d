#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "vfc/dcf.hpp"

namespace vfc {

/// Model parameters for a platoon of `n_platoon` vehicles assisted by a
/// vehicular fog of at most `k_max` resource units. Rates are per second,
/// computing rates in CPU cycles per second, `d` in cycles per task.
///
/// Default values are the reference scenario used throughout the tests
/// (four platoon vehicles, six fog vehicles, 20 tasks/s per vehicle).
struct SystemConfig {
  int n_platoon = 4;
  std::vector<double> f_platoon = {600.0, 660.0, 620.0, 650.0};
  double f_ru = 350.0;
  int k_max = 6;
  int n_r = 3;
  double lambda_p = 20.0;
  double lambda_v = 9.0;
  double mu_v = 8.0;
  double d = 40.0;
  double e_l = 0.1;
  double eta = 5.0;
  double zeta = 28.0;
  double alpha = 0.1;
  double epsilon = 10.0;
  dcf::DcfParams dcf;

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;
};

/// Parses the `key = value` config format. Keys not present keep their
/// default value; unknown keys, duplicate keys and malformed values are
/// errors reported with their line number. The result is validated.
SystemConfig parse_config(std::istream& in);
SystemConfig load_config(const std::filesystem::path& path);

/// Writes every key in the same format `parse_config` accepts.
void write_config(std::ostream& out, const SystemConfig& cfg);

}  // namespace vfc
