#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "vfc/smdp.hpp"
#include "vfc/solver.hpp"

namespace vfc {

struct SimConfig {
  double horizon = 500.0;              ///< seconds of simulated time
  std::int64_t max_events = 1'000'000;  ///< per replication
  int replications = 100;
  std::uint64_t seed = 1;
  /// Arrivals before this time are excluded from case/allocation/delay
  /// statistics. The discounted reward always starts at t = 0.
  double warmup = 0.0;

  void validate() const;
};

/// Per-replication (or aggregated) measurements. Probabilities that have
/// no observations behind them are NaN.
struct SimStats {
  int replications = 1;
  std::int64_t events = 0;
  std::int64_t arrivals_observed = 0;
  std::int64_t offloads = 0;      ///< platoon + fog placements observed
  std::int64_t vfc_offloads = 0;
  double offload_delay_sum = 0.0;

  double p_case0 = 0.0;  ///< platoon
  double p_case1 = 0.0;  ///< fog
  double p_case2 = 0.0;  ///< discard
  std::vector<double> p_alloc;  ///< p_alloc[j-1]: share of fog offloads using j RUs
  double mean_offload_delay = 0.0;
  double discounted_reward = 0.0;

  /// 95% normal-approximation half-widths across replications.
  struct HalfWidths {
    double p_case0 = 0.0;
    double p_case1 = 0.0;
    double p_case2 = 0.0;
    std::vector<double> p_alloc;
    double mean_offload_delay = 0.0;
    double discounted_reward = 0.0;
  } ci;
};

/// Time to the next event and which clock fired.
struct Sojourn {
  double duration = 0.0;
  Event event;
  double total_rate = 0.0;
};

/// Races the exponential clocks of `occ` (see event_rates).
Sojourn sample_sojourn(const SystemConfig& cfg, const Occupancy& occ, std::mt19937_64& rng);

/// Stream seed for replication `replication` of a run seeded with `seed`.
std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t replication);

/// One trajectory from the reference state (empty occupancy, full fleet,
/// task arriving at t = 0) under `pi`.
SimStats run_replication(const Scenario& sc, const StationaryPolicy& pi, const SimConfig& sim,
                         std::uint64_t seed);

/// Means across replications; the delay mean is weighted by offload
/// counts.
SimStats aggregate(std::span<const SimStats> stats);

/// Runs sim.replications independent replications and aggregates them.
SimStats simulate(const Scenario& sc, const StationaryPolicy& pi, const SimConfig& sim);

}  // namespace vfc
