#pragma once

#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

#include "vfc/config.hpp"
#include "vfc/dcf.hpp"
#include "vfc/state.hpp"

namespace vfc {

/// Analytical transmit delays needed by the income function: the
/// in-platoon hop (N contenders, whole task) and the leader-to-fog hop for
/// every fleet size m and RU count j (m + 1 contenders, j sub-tasks).
class DelayTable {
 public:
  DelayTable() = default;
  explicit DelayTable(const SystemConfig& cfg);

  double platoon() const { return t_p_; }
  /// Leader-to-fog delay for j sub-tasks while the fleet holds m vehicles.
  double vfc(int m, int j) const { return t_vf_.at(m).at(j - 1); }

  const dcf::DcfResult& platoon_dcf() const { return platoon_dcf_; }

 private:
  double t_p_ = 0.0;
  dcf::DcfResult platoon_dcf_;
  std::vector<std::vector<double>> t_vf_;
};

/// Configuration bundled with the objects derived from it.
struct Scenario {
  SystemConfig cfg;
  StateIndex index;
  DelayTable delays;

  static Scenario build(const SystemConfig& cfg);

  /// Empty platoon and fog, full fleet (m = K), pending task arrival.
  SystemState reference_state() const;
};

struct RewardTerms {
  double income = 0.0;
  double cost = 0.0;
  double reward = 0.0;
  int cost_rate = 0;
  double beta = 0.0;
};

struct Transition {
  std::size_t next = 0;
  double probability = 0.0;
};
using TransitionRow = std::vector<Transition>;

/// Competing exponential clocks of an occupancy, in the fixed order
/// A, D_k (busy k), L_j (B_j >= 1), F+1 (m < K), F-1 (m > 0).
std::vector<std::pair<Event, double>> event_rates(const SystemConfig& cfg,
                                                  const Occupancy& occ);

/// Analytical offloading delay of a placement decided in occupancy `occ`
/// (before placement). Zero for discard and no-op.
double offload_delay(const SystemConfig& cfg, const DelayTable& delays,
                     const Occupancy& occ, const Action& a);

double income(const SystemConfig& cfg, const SystemState& s, const Action& a,
              const DelayTable& delays);
/// Total event rate out of the post-action occupancy.
double beta(const SystemConfig& cfg, const SystemState& s, const Action& a);
/// Expected discounted occupancy cost over the sojourn.
double cost(const SystemConfig& cfg, const SystemState& s, const Action& a);
RewardTerms reward(const SystemConfig& cfg, const SystemState& s, const Action& a,
                   const DelayTable& delays);
TransitionRow transitions(const SystemConfig& cfg, const StateIndex& index,
                          const SystemState& s, const Action& a);

/// y = N*lambda_p + lambda_v + mu_v + sum(f_i)/d + K*N_R*f_v/d, an upper
/// bound on every beta(s, a).
double normalization_factor(const SystemConfig& cfg);

/// Continuous-time model in compressed row form. Rows of state s occupy
/// [state_begin[s], state_begin[s+1]) and list feasible actions in
/// tie-break order.
struct SmdpModel {
  std::size_t state_count = 0;
  std::vector<std::size_t> state_begin;
  std::vector<Action> actions;
  std::vector<RewardTerms> terms;
  std::vector<std::size_t> succ_begin;
  std::vector<Transition> succ;

  std::size_t row_count() const { return actions.size(); }
};

SmdpModel build_model(const Scenario& sc);

/// Discrete-time equivalent after uniformization with rate y.
struct UniformizedModel {
  double y = 0.0;
  double gamma = 0.0;
  double alpha = 0.0;
  std::size_t state_count = 0;
  std::vector<std::size_t> state_begin;
  std::vector<Action> actions;
  std::vector<double> rewards;  ///< R~ per row
  std::vector<double> rates;    ///< beta per row
  std::vector<std::size_t> succ_begin;
  std::vector<Transition> succ;  ///< P~ per row, diagonal included

  std::size_t row_count() const { return actions.size(); }
  /// Row of action `a` in state `s`, or row_count() if not feasible.
  std::size_t find_row(std::size_t s, const Action& a) const;
};

/// Uses y = normalization_factor(cfg); throws ContractViolation if some
/// beta exceeds it.
UniformizedModel uniformize(const SystemConfig& cfg, const SmdpModel& model);

/// Line-oriented dump of every (state, action) row, byte-stable for a
/// fixed configuration.
void write_model_dump(std::ostream& out, const Scenario& sc, const SmdpModel& model);

}  // namespace vfc
