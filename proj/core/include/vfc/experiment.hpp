#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vfc/config.hpp"
#include "vfc/simulator.hpp"
#include "vfc/smdp.hpp"

namespace vfc {

enum class Mode { solve, simulate, sweep_k, sweep_lambda, sweep_d };
enum class Strategy { smdp, greedy, equal };

std::string_view to_string(Mode m);
std::string_view to_string(Strategy s);
Mode parse_mode(std::string_view text);
Strategy parse_strategy(std::string_view text);

/// `a:b:step` (inclusive of b) or a comma-separated list. The result must
/// be non-empty and strictly increasing.
std::vector<double> parse_sweep(std::string_view text);

/// Default sweep values for a sweep mode; empty for solve/simulate.
std::vector<double> default_sweep(Mode m);

struct ExperimentSpec {
  Mode mode = Mode::solve;
  std::vector<Strategy> strategies = {Strategy::smdp};
  std::vector<double> sweep;  ///< empty selects default_sweep(mode)
  SimConfig sim;
  bool record_wall_time = false;

  void validate() const;
};

struct ExperimentRow {
  std::string sweep_param;  ///< "k_max", "lambda_p", "d" or empty
  double sweep_value = 0.0;
  Strategy strategy = Strategy::smdp;
  int k_max = 0;
  double lambda_p = 0.0;
  double d = 0.0;
  std::size_t states = 0;

  double value_reference = 0.0;  ///< exact value at the reference state
  double value_mean = 0.0;       ///< exact value averaged over the time-stationary law
  std::optional<SimStats> sim;   ///< absent in solve mode
  std::int64_t solver_iterations = 0;
  double solver_residual = 0.0;
  std::optional<double> wall_time;
};

/// Optional side outputs of a single-configuration run.
struct ExperimentArtifacts {
  std::optional<std::vector<Action>> smdp_policy;
  std::optional<Scenario> scenario;
};

std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec, const SystemConfig& cfg,
                                          ExperimentArtifacts* artifacts = nullptr);

/// Writes the fixed CSV header followed by one line per row. Numbers use
/// nine significant digits; unavailable values are empty fields.
void write_csv(std::ostream& out, const std::vector<ExperimentRow>& rows);
void write_csv(const std::vector<ExperimentRow>& rows, const std::filesystem::path& path);

/// Column names in output order for a model with `n_r` RU classes
/// (at least three p_a columns are always written).
std::vector<std::string> csv_columns(int n_r);

}  // namespace vfc
