#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "vfc/config.hpp"

namespace vfc {

/// The event that triggered the current decision epoch.
struct Event {
  enum class Kind : std::uint8_t {
    task_arrival,       ///< A
    platoon_departure,  ///< D_i, task on platoon vehicle i finished
    ru_departure,       ///< L_j, task holding j RUs finished
    fleet_arrival,      ///< F+1
    fleet_departure,    ///< F-1
  };

  Kind kind = Kind::task_arrival;
  int which = 0;  ///< 1-based vehicle (D_i) or RU count (L_j); 0 otherwise

  static constexpr Event arrival() { return {Kind::task_arrival, 0}; }
  static constexpr Event platoon_done(int i) { return {Kind::platoon_departure, i}; }
  static constexpr Event ru_done(int j) { return {Kind::ru_departure, j}; }
  static constexpr Event fleet_join() { return {Kind::fleet_arrival, 0}; }
  static constexpr Event fleet_leave() { return {Kind::fleet_departure, 0}; }

  friend bool operator==(const Event&, const Event&) = default;
};

/// Offloading decision.
struct Action {
  enum class Kind : std::uint8_t { discard, platoon, vfc, noop };

  Kind kind = Kind::noop;
  int which = 0;  ///< 1-based vehicle (platoon) or RU count (vfc)

  static constexpr Action discard() { return {Kind::discard, 0}; }
  static constexpr Action platoon(int i) { return {Kind::platoon, i}; }
  static constexpr Action vfc(int j) { return {Kind::vfc, j}; }
  static constexpr Action noop() { return {Kind::noop, 0}; }

  friend bool operator==(const Action&, const Action&) = default;
};

/// Position of an action in the fixed order used for tie-breaking:
/// discard < platoon(1..N) < vfc(1..N_R) < noop.
int action_rank(const Action& a, int n_platoon, int n_r);

/// Resource usage without the pending event.
struct Occupancy {
  std::vector<std::uint8_t> busy;  ///< n_i in {0, 1}, size N
  std::vector<int> ru_tasks;       ///< B_j, index j-1, size N_R
  int fleet = 0;                   ///< M, fog vehicles currently present

  /// sum_r r * B_r
  int used_rus() const;
  int busy_vehicles() const;
  /// Cost-rate count: busy platoon vehicles plus occupied RUs.
  int occupied_units() const { return busy_vehicles() + used_rus(); }

  friend bool operator==(const Occupancy&, const Occupancy&) = default;
};

struct SystemState {
  Occupancy occ;
  Event event;

  friend bool operator==(const SystemState&, const SystemState&) = default;
};

Occupancy empty_occupancy(const SystemConfig& cfg, int fleet);

/// Whether `s` satisfies capacity and event-consistency constraints.
bool is_feasible(const SystemConfig& cfg, const SystemState& s);

/// Dense numbering of the feasible states, in lexicographic order over
/// (n, b, m, event). Immutable once built.
class StateIndex {
 public:
  StateIndex() = default;
  explicit StateIndex(const SystemConfig& cfg);

  std::size_t size() const { return states_.size(); }
  const SystemState& state(std::size_t i) const { return states_.at(i); }
  const std::vector<SystemState>& states() const { return states_; }

  /// Index of a feasible state; throws ContractViolation for others.
  std::size_t index_of(const SystemState& s) const;
  bool contains(const SystemState& s) const;
  /// Index of `s` or size() when absent.
  std::size_t find(const SystemState& s) const;

  int n_platoon() const { return n_platoon_; }
  int n_r() const { return n_r_; }
  int k_max() const { return k_max_; }

 private:
  std::uint64_t key(const SystemState& s) const;

  int n_platoon_ = 0;
  int n_r_ = 0;
  int k_max_ = 0;
  std::vector<SystemState> states_;
  std::unordered_map<std::uint64_t, std::size_t> lookup_;
};

StateIndex enumerate_states(const SystemConfig& cfg);

/// Admissible actions in `s`, in tie-break order.
std::vector<Action> feasible_actions(const SystemConfig& cfg, const SystemState& s);

bool is_feasible_action(const SystemConfig& cfg, const SystemState& s, const Action& a);

/// Occupancy right after the event in `s` has taken effect and `a` has
/// been applied. A fleet departure that finds every RU busy interrupts one
/// task of the largest RU class in use. Throws ContractViolation when `a`
/// is not feasible in `s`.
Occupancy apply_dynamics(const SystemConfig& cfg, const SystemState& s, const Action& a);

/// Unchecked core of apply_dynamics, mutating `occ` in place. The caller
/// guarantees that (occ, event) is feasible and `a` admissible in it.
void apply_in_place(const SystemConfig& cfg, Occupancy& occ, const Event& event,
                    const Action& a);

/// Whether a fleet departure in `occ` interrupts a running task.
inline bool departure_interrupts(const Occupancy& occ) {
  return occ.fleet >= 1 && occ.used_rus() == occ.fleet;
}

std::string to_string(const Event& e);
std::string to_string(const Action& a);
/// Compact form `n=1010;b=1,0,2;m=4;e=A`.
std::string to_string(const SystemState& s);

/// Inverse of the `to_string` forms; throw ContractViolation on bad input.
Event parse_event(std::string_view text);
Action parse_action(std::string_view text);
SystemState parse_state(std::string_view text);

}  // namespace vfc
