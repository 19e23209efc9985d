#pragma once

#include <cstdint>

namespace vfc::dcf {

/// IEEE 802.11p DCF timing and backoff parameters.
///
/// Frame sizes are kept in bits and converted to air time through
/// `bit_rate`; spacings and the propagation delay are in seconds.
struct DcfParams {
  int w_min = 3;  ///< minimum contention window, slots
  int m = 1;      ///< retransmission limit
  double t_idle = 20e-6;
  double delta = 2e-6;  ///< propagation delay
  double difs = 50e-6;
  double sifs = 10e-6;
  double header_bits = 400.0;
  double payload_bits = 8.0 * 1920.0;
  double ack_bits = 240.0;
  double ack_timeout_bits = 292.0;
  double bit_rate = 6e6;  ///< bits per second

  /// Throws ConfigError when a field is out of range.
  void validate() const;
};

struct FixedPoint {
  double omega = 0.0;  ///< per-slot transmission probability
  double q = 0.0;      ///< conditional collision probability
};

/// Everything the analytical model derives for one (contenders, sub-task
/// count) pair.
struct DcfResult {
  double omega = 0.0;
  double q = 0.0;
  double q_idle = 1.0;
  double q_s = 0.0;
  double q_c = 0.0;
  double t_slot = 0.0;  ///< seconds
  double e_tr = 0.0;    ///< expected slots per sub-task
  int n_tr = 1;
  int theta = 1;
};

/// Transmission probability as a function of the collision probability
/// for a station running binary exponential backoff.
double transmission_probability(const DcfParams& p, double q);

/// Solves the coupled collision/transmission equations for `n_tr`
/// contending stations. Both equations hold with residual <= 1e-10 on
/// return; throws FixedPointError otherwise.
FixedPoint solve_fixed_point(const DcfParams& p, int n_tr);

/// Average slot length (seconds) given the per-station transmission
/// probability. The payload is split into `theta` equal sub-tasks.
double slot_time(const DcfParams& p, double omega, int n_tr, int theta);

/// Expected number of slots to deliver one sub-task at collision
/// probability q, q in [0, 1).
double expected_slots(const DcfParams& p, double q);

/// Full analysis: fixed point, slot probabilities, slot length and
/// expected slot count.
DcfResult analyze(const DcfParams& p, int n_tr, int theta);

/// Delay of sending a task as `theta` sub-tasks among `n_tr` contenders:
/// theta * T_slot * E_tr.
double transmit_delay(const DcfParams& p, int n_tr, int theta);

/// Slot-by-slot simulation of the backoff procedure: at stage k the
/// backoff counter is uniform on [0, 2^k * w_min - 1], each attempt
/// collides independently with probability q, and the frame is dropped
/// after m retransmissions. Returns the mean number of slots (backoff
/// slots plus one slot per attempt) consumed per frame.
double monte_carlo_backoff(const DcfParams& p, double q, std::int64_t trials,
                           std::uint64_t seed);

}  // namespace vfc::dcf
