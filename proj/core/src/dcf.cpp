#include "vfc/dcf.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "vfc/error.hpp"

namespace vfc::dcf {
namespace {

constexpr int kPicardBudget = 100000;
constexpr double kPicardTolerance = 1e-12;
constexpr double kResidualBound = 1e-10;

// sum_{k=0}^{terms-1} x^k; stays finite at x = 1 where the closed form
// (1 - x^terms) / (1 - x) is 0/0.
double geometric_sum(double x, int terms) {
  double sum = 0.0;
  double power = 1.0;
  for (int k = 0; k < terms; ++k) {
    sum += power;
    power *= x;
  }
  return sum;
}

double collision_map(const DcfParams& p, double q, int n_tr) {
  return 1.0 - std::pow(1.0 - transmission_probability(p, q), n_tr - 1);
}

}  // namespace

void DcfParams::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("dcf: " + what); };
  if (w_min < 1) fail("w_min must be >= 1");
  if (m < 0) fail("m must be >= 0");
  if (m > 30) fail("m must be <= 30");
  if (!(t_idle > 0) || !(delta > 0) || !(difs > 0) || !(sifs > 0))
    fail("durations must be > 0");
  if (!(header_bits > 0) || !(payload_bits > 0) || !(ack_bits > 0) ||
      !(ack_timeout_bits > 0))
    fail("frame sizes must be > 0");
  if (!(bit_rate > 0)) fail("bit_rate must be > 0");
}

double transmission_probability(const DcfParams& p, double q) {
  // 2(1-2q) / [(1-2q)(W+1) + qW(1-(2q)^m)] with the (1-2q) factor
  // divided out, which removes the 0/0 at q = 1/2.
  const double w = p.w_min;
  return 2.0 / ((w + 1.0) + q * w * geometric_sum(2.0 * q, p.m));
}

FixedPoint solve_fixed_point(const DcfParams& p, int n_tr) {
  if (n_tr < 1) throw ContractViolation("solve_fixed_point: n_tr must be >= 1");

  double q = 0.0;
  double residual = std::abs(collision_map(p, q, n_tr) - q);
  for (int it = 0; it < kPicardBudget && residual > kPicardTolerance; ++it) {
    q = 0.5 * q + 0.5 * collision_map(p, q, n_tr);
    residual = std::abs(collision_map(p, q, n_tr) - q);
  }

  if (residual > kPicardTolerance) {
    // g(q) = F(q) - q has g(0) >= 0 and g(1) <= 0.
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      (collision_map(p, mid, n_tr) - mid >= 0.0 ? lo : hi) = mid;
    }
    q = 0.5 * (lo + hi);
    residual = std::abs(collision_map(p, q, n_tr) - q);
  }

  if (!(residual <= kResidualBound) || !(q < 1.0)) {
    std::ostringstream os;
    os << "DCF fixed point did not converge for n_tr=" << n_tr << " (q=" << q
       << ", residual=" << residual << ")";
    throw FixedPointError(os.str(), residual);
  }
  return {transmission_probability(p, q), q};
}

double slot_time(const DcfParams& p, double omega, int n_tr, int theta) {
  if (n_tr < 1 || theta < 1)
    throw ContractViolation("slot_time: n_tr and theta must be >= 1");
  const double q_idle = std::pow(1.0 - omega, n_tr);
  const double q_s = n_tr * omega * std::pow(1.0 - omega, n_tr - 1);
  const double q_c = std::max(0.0, 1.0 - q_idle - q_s);

  const double frame = (p.header_bits + p.payload_bits / theta) / p.bit_rate;
  const double t_s = frame + p.sifs + p.delta + p.ack_bits / p.bit_rate +
                     p.difs + p.delta;
  const double t_c = frame + p.sifs + p.delta + p.ack_timeout_bits / p.bit_rate;
  return q_idle * p.t_idle + q_s * t_s + q_c * t_c;
}

double expected_slots(const DcfParams& p, double q) {
  if (!(q >= 0.0 && q < 1.0))
    throw ContractViolation("expected_slots: q must lie in [0, 1)");
  const int m = p.m;
  const double w = p.w_min;
  const double q_m1 = std::pow(q, m + 1);

  // [1 - (m+2)q^{m+1} + (m+1)q^{m+2}] / [2(1-q)] == (1-q)/2 * sum (k+1) q^k
  double weighted = 0.0;
  double power = 1.0;
  for (int k = 0; k <= m; ++k) {
    weighted += (k + 1) * power;
    power *= q;
  }
  const double success_attempts = 0.5 * (1.0 - q) * weighted;
  const double backoff_window = (1.0 - q) * geometric_sum(2.0 * q, m + 1) * w;
  const double window_offset = -0.5 * (1.0 - q_m1) * w;
  const double two_m = std::ldexp(1.0, m);
  const double exhausted =
      0.5 * q_m1 *
      ((m + 1) + (2.0 * two_m - 1.0) * w +
       (2.0 - q) * (two_m * w + 1.0) / (1.0 - q));
  return success_attempts + backoff_window + window_offset + exhausted;
}

DcfResult analyze(const DcfParams& p, int n_tr, int theta) {
  if (theta < 1) throw ContractViolation("analyze: theta must be >= 1");
  const FixedPoint fp = solve_fixed_point(p, n_tr);
  DcfResult r;
  r.omega = fp.omega;
  r.q = fp.q;
  r.n_tr = n_tr;
  r.theta = theta;
  r.q_idle = std::pow(1.0 - fp.omega, n_tr);
  r.q_s = n_tr * fp.omega * std::pow(1.0 - fp.omega, n_tr - 1);
  r.q_c = std::max(0.0, 1.0 - r.q_idle - r.q_s);
  r.t_slot = slot_time(p, fp.omega, n_tr, theta);
  r.e_tr = expected_slots(p, fp.q);
  return r;
}

double transmit_delay(const DcfParams& p, int n_tr, int theta) {
  const DcfResult r = analyze(p, n_tr, theta);
  return theta * r.t_slot * r.e_tr;
}

double monte_carlo_backoff(const DcfParams& p, double q, std::int64_t trials,
                           std::uint64_t seed) {
  if (trials < 1) throw ContractViolation("monte_carlo_backoff: trials must be >= 1");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution collide(std::clamp(q, 0.0, 1.0));

  double total = 0.0;
  for (std::int64_t t = 0; t < trials; ++t) {
    std::int64_t slots = 0;
    for (int stage = 0; stage <= p.m; ++stage) {
      const std::int64_t window = std::int64_t{p.w_min} << stage;
      std::uniform_int_distribution<std::int64_t> backoff(0, window - 1);
      slots += backoff(rng) + 1;
      if (!collide(rng)) break;
    }
    total += static_cast<double>(slots);
  }
  return total / static_cast<double>(trials);
}

}  // namespace vfc::dcf
