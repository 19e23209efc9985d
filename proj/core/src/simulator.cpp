#include "vfc/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vfc/error.hpp"

namespace vfc {
namespace {

constexpr double kZ95 = 1.959963984540054;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Mean and 95% half-width over the finite entries.
std::pair<double, double> mean_halfwidth(const std::vector<double>& xs) {
  double sum = 0.0;
  int n = 0;
  for (double x : xs)
    if (std::isfinite(x)) {
      sum += x;
      ++n;
    }
  if (n == 0) return {kNaN, kNaN};
  const double mean = sum / n;
  if (n == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs)
    if (std::isfinite(x)) ss += (x - mean) * (x - mean);
  return {mean, kZ95 * std::sqrt(ss / (n - 1) / n)};
}

// Event rates written into a caller-owned buffer.
void fill_rates(const SystemConfig& cfg, const Occupancy& occ,
                std::vector<std::pair<Event, double>>& rates) {
  rates.clear();
  rates.emplace_back(Event::arrival(), cfg.n_platoon * cfg.lambda_p);
  for (int k = 1; k <= cfg.n_platoon; ++k)
    if (occ.busy[k - 1]) rates.emplace_back(Event::platoon_done(k), cfg.f_platoon[k - 1] / cfg.d);
  for (int j = 1; j <= cfg.n_r; ++j)
    if (occ.ru_tasks[j - 1] > 0)
      rates.emplace_back(Event::ru_done(j), j * occ.ru_tasks[j - 1] * cfg.f_ru / cfg.d);
  if (occ.fleet < cfg.k_max) rates.emplace_back(Event::fleet_join(), cfg.lambda_v);
  if (occ.fleet > 0) rates.emplace_back(Event::fleet_leave(), cfg.mu_v);
}

Sojourn race(const std::vector<std::pair<Event, double>>& rates, std::mt19937_64& rng) {
  double total = 0.0;
  for (const auto& r : rates) total += r.second;
  Sojourn out;
  out.total_rate = total;
  out.duration = std::exponential_distribution<double>(total)(rng);
  double pick = std::uniform_real_distribution<double>(0.0, total)(rng);
  out.event = rates.back().first;
  for (const auto& [event, rate] : rates) {
    if (pick < rate) {
      out.event = event;
      break;
    }
    pick -= rate;
  }
  return out;
}

}  // namespace

void SimConfig::validate() const {
  if (!(warmup >= 0.0)) throw ContractViolation("simulation warmup must be >= 0");
  if (!(horizon > warmup)) throw ContractViolation("simulation horizon must exceed warmup");
  if (replications < 1) throw ContractViolation("replications must be >= 1");
  if (max_events < 1) throw ContractViolation("max_events must be >= 1");
}

std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t replication) {
  return splitmix64(splitmix64(seed) ^ splitmix64(replication + 0x5851f42d4c957f2dULL));
}

Sojourn sample_sojourn(const SystemConfig& cfg, const Occupancy& occ, std::mt19937_64& rng) {
  std::vector<std::pair<Event, double>> rates;
  fill_rates(cfg, occ, rates);
  return race(rates, rng);
}

SimStats run_replication(const Scenario& sc, const StationaryPolicy& pi, const SimConfig& sim,
                         std::uint64_t seed) {
  sim.validate();
  const SystemConfig& cfg = sc.cfg;
  if (pi.size() != sc.index.size())
    throw ContractViolation("run_replication: policy does not match the state index");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::pair<Event, double>> rates;
  rates.reserve(3 + cfg.n_platoon + cfg.n_r);

  SimStats st;
  std::vector<std::int64_t> alloc_counts(cfg.n_r, 0);
  std::int64_t case_counts[3] = {0, 0, 0};

  SystemState state = sc.reference_state();
  double t = 0.0;
  double discount = 1.0;  // exp(-alpha t)
  double reward = 0.0;

  while (st.events < sim.max_events) {
    ++st.events;
    Action action = Action::noop();
    if (state.event.kind == Event::Kind::task_arrival) {
      const std::size_t idx = sc.index.find(state);
      if (idx == sc.index.size())
        throw ContractViolation("simulator reached unindexed state " + to_string(state));
      const auto& choices = pi.choices[idx];
      action = choices.front().action;
      if (choices.size() > 1) {
        double u = unit(rng);
        for (const ActionProbability& ap : choices) {
          action = ap.action;
          if (u < ap.probability) break;
          u -= ap.probability;
        }
      }
      if (!is_feasible_action(cfg, state, action))
        throw ContractViolation("policy chose infeasible action " + to_string(action) +
                                " in " + to_string(state));
      if (t >= sim.warmup) {
        ++st.arrivals_observed;
        switch (action.kind) {
          case Action::Kind::platoon:
            ++case_counts[0];
            break;
          case Action::Kind::vfc:
            ++case_counts[1];
            ++alloc_counts[action.which - 1];
            break;
          default:
            ++case_counts[2];
            break;
        }
        if (action.kind == Action::Kind::platoon || action.kind == Action::Kind::vfc) {
          ++st.offloads;
          st.offload_delay_sum += offload_delay(cfg, sc.delays, state.occ, action);
        }
      }
    }
    reward += discount * income(cfg, state, action, sc.delays);

    apply_in_place(cfg, state.occ, state.event, action);
    if (state.occ.used_rus() > state.occ.fleet)
      throw ContractViolation("simulator produced an infeasible occupancy");

    fill_rates(cfg, state.occ, rates);
    const Sojourn next = race(rates, rng);
    const double end = std::min(t + next.duration, sim.horizon);
    const double end_discount = std::exp(-cfg.alpha * end);
    reward -= state.occ.occupied_units() * (discount - end_discount) / cfg.alpha;

    t += next.duration;
    if (t >= sim.horizon) break;
    discount = end_discount;
    state.event = next.event;
  }

  st.vfc_offloads = case_counts[1];
  st.discounted_reward = reward;
  if (st.arrivals_observed > 0) {
    const auto n = static_cast<double>(st.arrivals_observed);
    st.p_case0 = case_counts[0] / n;
    st.p_case1 = case_counts[1] / n;
    st.p_case2 = case_counts[2] / n;
  } else {
    st.p_case0 = st.p_case1 = st.p_case2 = kNaN;
  }
  st.p_alloc.assign(cfg.n_r, kNaN);
  if (st.vfc_offloads > 0)
    for (int j = 0; j < cfg.n_r; ++j)
      st.p_alloc[j] = static_cast<double>(alloc_counts[j]) / static_cast<double>(st.vfc_offloads);
  st.mean_offload_delay = st.offloads > 0 ? st.offload_delay_sum / st.offloads : kNaN;
  st.ci.p_alloc.assign(cfg.n_r, 0.0);
  return st;
}

SimStats aggregate(std::span<const SimStats> stats) {
  if (stats.empty()) throw ContractViolation("aggregate: no replications");
  if (stats.size() == 1) {
    SimStats single = stats.front();
    single.ci = {};
    single.ci.p_alloc.assign(single.p_alloc.size(), 0.0);
    return single;
  }

  SimStats out;
  out.replications = 0;
  const std::size_t classes = stats.front().p_alloc.size();
  std::vector<double> c0, c1, c2, rw;
  std::vector<std::vector<double>> alloc(classes);
  for (const SimStats& s : stats) {
    out.replications += s.replications;
    out.events += s.events;
    out.arrivals_observed += s.arrivals_observed;
    out.offloads += s.offloads;
    out.vfc_offloads += s.vfc_offloads;
    out.offload_delay_sum += s.offload_delay_sum;
    c0.push_back(s.p_case0);
    c1.push_back(s.p_case1);
    c2.push_back(s.p_case2);
    rw.push_back(s.discounted_reward);
    for (std::size_t j = 0; j < classes; ++j) alloc[j].push_back(s.p_alloc.at(j));
  }
  std::tie(out.p_case0, out.ci.p_case0) = mean_halfwidth(c0);
  std::tie(out.p_case1, out.ci.p_case1) = mean_halfwidth(c1);
  std::tie(out.p_case2, out.ci.p_case2) = mean_halfwidth(c2);
  std::tie(out.discounted_reward, out.ci.discounted_reward) = mean_halfwidth(rw);
  out.p_alloc.resize(classes);
  out.ci.p_alloc.resize(classes);
  for (std::size_t j = 0; j < classes; ++j)
    std::tie(out.p_alloc[j], out.ci.p_alloc[j]) = mean_halfwidth(alloc[j]);

  // Ratio estimator for the offload-weighted delay mean.
  if (out.offloads > 0) {
    out.mean_offload_delay = out.offload_delay_sum / static_cast<double>(out.offloads);
    double ss = 0.0;
    int n = 0;
    for (const SimStats& s : stats) {
      if (s.offloads == 0) continue;
      const double dev = s.offload_delay_sum - out.mean_offload_delay * s.offloads;
      ss += dev * dev;
      ++n;
    }
    out.ci.mean_offload_delay =
        n > 1 ? kZ95 * std::sqrt(ss * n / (n - 1)) / static_cast<double>(out.offloads) : 0.0;
  } else {
    out.mean_offload_delay = kNaN;
    out.ci.mean_offload_delay = kNaN;
  }
  return out;
}

SimStats simulate(const Scenario& sc, const StationaryPolicy& pi, const SimConfig& sim) {
  sim.validate();
  std::vector<SimStats> runs(static_cast<std::size_t>(sim.replications));
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < sim.replications; ++r) {
    try {
      runs[r] = run_replication(sc, pi, sim, replication_seed(sim.seed, r));
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return aggregate(runs);
}

}  // namespace vfc
