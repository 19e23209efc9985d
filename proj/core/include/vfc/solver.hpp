#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "vfc/smdp.hpp"
#include "vfc/state.hpp"

namespace vfc {

struct SolveOptions {
  std::int64_t max_sweeps = 10'000'000;
  /// Throw if a sweep difference grows by more than gamma (plus round-off).
  bool check_contraction = true;
};

struct SolveResult {
  std::vector<double> values;
  std::vector<Action> policy;
  std::int64_t iterations = 0;
  double final_residual = 0.0;
  double threshold = 0.0;  ///< epsilon (1 - gamma) / (2 gamma)
  std::vector<double> residual_trace;
};

struct ActionProbability {
  Action action;
  double probability = 0.0;
};

/// Randomized stationary policy: one distribution over feasible actions
/// per state, indexed like the StateIndex it was built for.
struct StationaryPolicy {
  std::vector<std::vector<ActionProbability>> choices;

  static StationaryPolicy deterministic(const std::vector<Action>& actions);
  std::size_t size() const { return choices.size(); }
};

/// Synchronous value iteration from v = 0 with the stopping rule
/// ||v_{l+1} - v_l||_inf < epsilon (1 - gamma) / (2 gamma). Greedy actions
/// are extracted with ties going to the earliest action in tie-break order.
SolveResult value_iteration(const UniformizedModel& model, double epsilon,
                            const SolveOptions& options = {});

/// Greedy (one-step lookahead) actions with respect to `values`.
std::vector<Action> extract_policy(const UniformizedModel& model,
                                   const std::vector<double>& values);

/// Exact value of a stationary policy: the fixed point of
/// v = R_pi + gamma P_pi v, solved to sup-norm residual <= 1e-10.
std::vector<double> evaluate_policy(const UniformizedModel& model,
                                    const StationaryPolicy& pi);

/// Long-run fraction of time spent in each state under `pi`.
std::vector<double> occupancy_distribution(const UniformizedModel& model,
                                           const StationaryPolicy& pi);

/// Throws ContractViolation unless every distribution sums to one and is
/// supported on rows present in the model.
void validate_policy(const UniformizedModel& model, const StationaryPolicy& pi);

/// Fastest idle platoon vehicle, otherwise as many RUs as allowed,
/// otherwise discard.
StationaryPolicy greedy_policy(const SystemConfig& cfg, const StateIndex& index);

/// Uniform over the feasible actions at task arrivals.
StationaryPolicy equal_probability_policy(const SystemConfig& cfg, const StateIndex& index);

/// `state<TAB>action` per line in index order, preceded by one `#` line.
void write_policy_dump(std::ostream& out, const StateIndex& index,
                       const std::vector<Action>& policy);

/// Reads a dump written by write_policy_dump. Every state of `index` must
/// appear exactly once with a feasible action.
std::vector<Action> read_policy_dump(std::istream& in, const SystemConfig& cfg,
                                     const StateIndex& index);

}  // namespace vfc
