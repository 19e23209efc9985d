#include "vfc/smdp.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "vfc/error.hpp"

namespace vfc {

DelayTable::DelayTable(const SystemConfig& cfg) {
  platoon_dcf_ = dcf::analyze(cfg.dcf, cfg.n_platoon, 1);
  t_p_ = platoon_dcf_.t_slot * platoon_dcf_.e_tr;

  t_vf_.resize(cfg.k_max + 1);
  for (int m = 0; m <= cfg.k_max; ++m) {
    const int n_tr = m + 1;
    const dcf::FixedPoint fp = dcf::solve_fixed_point(cfg.dcf, n_tr);
    const double e_tr = dcf::expected_slots(cfg.dcf, fp.q);
    for (int j = 1; j <= cfg.n_r; ++j)
      t_vf_[m].push_back(j * dcf::slot_time(cfg.dcf, fp.omega, n_tr, j) * e_tr);
  }
}

Scenario Scenario::build(const SystemConfig& cfg) {
  cfg.validate();
  return Scenario{cfg, StateIndex(cfg), DelayTable(cfg)};
}

SystemState Scenario::reference_state() const {
  return {empty_occupancy(cfg, cfg.k_max), Event::arrival()};
}

std::vector<std::pair<Event, double>> event_rates(const SystemConfig& cfg,
                                                  const Occupancy& occ) {
  std::vector<std::pair<Event, double>> rates;
  rates.reserve(3 + cfg.n_platoon + cfg.n_r);
  rates.emplace_back(Event::arrival(), cfg.n_platoon * cfg.lambda_p);
  for (int k = 1; k <= cfg.n_platoon; ++k)
    if (occ.busy[k - 1]) rates.emplace_back(Event::platoon_done(k), cfg.f_platoon[k - 1] / cfg.d);
  for (int j = 1; j <= cfg.n_r; ++j)
    if (occ.ru_tasks[j - 1] > 0)
      rates.emplace_back(Event::ru_done(j), j * occ.ru_tasks[j - 1] * cfg.f_ru / cfg.d);
  if (occ.fleet < cfg.k_max) rates.emplace_back(Event::fleet_join(), cfg.lambda_v);
  if (occ.fleet > 0) rates.emplace_back(Event::fleet_leave(), cfg.mu_v);
  return rates;
}

double offload_delay(const SystemConfig& cfg, const DelayTable& delays,
                     const Occupancy& occ, const Action& a) {
  switch (a.kind) {
    case Action::Kind::platoon:
      return delays.platoon() + cfg.d / cfg.f_platoon[a.which - 1];
    case Action::Kind::vfc:
      return delays.platoon() + delays.vfc(occ.fleet, a.which) +
             cfg.d / (a.which * cfg.f_ru);
    case Action::Kind::discard:
    case Action::Kind::noop:
      return 0.0;
  }
  return 0.0;
}

double income(const SystemConfig& cfg, const SystemState& s, const Action& a,
              const DelayTable& delays) {
  if (!is_feasible_action(cfg, s, a))
    throw ContractViolation("income: action " + to_string(a) + " not feasible in " +
                            to_string(s));
  switch (a.kind) {
    case Action::Kind::platoon:
    case Action::Kind::vfc:
      return cfg.eta * (cfg.e_l - offload_delay(cfg, delays, s.occ, a));
    case Action::Kind::discard:
      return -cfg.zeta;
    case Action::Kind::noop:
      if (s.event.kind == Event::Kind::fleet_departure && departure_interrupts(s.occ))
        return -cfg.zeta;
      return 0.0;
  }
  return 0.0;
}

double beta(const SystemConfig& cfg, const SystemState& s, const Action& a) {
  const Occupancy next = apply_dynamics(cfg, s, a);
  double total = 0.0;
  for (const auto& [event, rate] : event_rates(cfg, next)) total += rate;
  return total;
}

double cost(const SystemConfig& cfg, const SystemState& s, const Action& a) {
  const Occupancy next = apply_dynamics(cfg, s, a);
  return next.occupied_units() / (cfg.alpha + beta(cfg, s, a));
}

RewardTerms reward(const SystemConfig& cfg, const SystemState& s, const Action& a,
                   const DelayTable& delays) {
  RewardTerms t;
  const Occupancy next = apply_dynamics(cfg, s, a);
  t.income = income(cfg, s, a, delays);
  t.beta = 0.0;
  for (const auto& [event, rate] : event_rates(cfg, next)) t.beta += rate;
  t.cost_rate = next.occupied_units();
  t.cost = t.cost_rate / (cfg.alpha + t.beta);
  t.reward = t.income - t.cost;
  return t;
}

TransitionRow transitions(const SystemConfig& cfg, const StateIndex& index,
                          const SystemState& s, const Action& a) {
  const Occupancy next = apply_dynamics(cfg, s, a);
  const auto rates = event_rates(cfg, next);
  double total = 0.0;
  for (const auto& [event, rate] : rates) total += rate;

  TransitionRow row;
  row.reserve(rates.size());
  for (const auto& [event, rate] : rates)
    row.push_back({index.index_of(SystemState{next, event}), rate / total});
  return row;
}

double normalization_factor(const SystemConfig& cfg) {
  double f_sum = 0.0;
  for (double f : cfg.f_platoon) f_sum += f;
  return cfg.n_platoon * cfg.lambda_p + cfg.lambda_v + cfg.mu_v + f_sum / cfg.d +
         static_cast<double>(cfg.k_max) * cfg.n_r * cfg.f_ru / cfg.d;
}

SmdpModel build_model(const Scenario& sc) {
  const SystemConfig& cfg = sc.cfg;
  SmdpModel model;
  model.state_count = sc.index.size();
  model.state_begin.reserve(model.state_count + 1);
  model.succ_begin.push_back(0);
  for (std::size_t s = 0; s < model.state_count; ++s) {
    model.state_begin.push_back(model.actions.size());
    const SystemState& state = sc.index.state(s);
    for (const Action& a : feasible_actions(cfg, state)) {
      model.actions.push_back(a);
      model.terms.push_back(reward(cfg, state, a, sc.delays));
      for (const Transition& t : transitions(cfg, sc.index, state, a))
        model.succ.push_back(t);
      model.succ_begin.push_back(model.succ.size());
    }
  }
  model.state_begin.push_back(model.actions.size());
  return model;
}

std::size_t UniformizedModel::find_row(std::size_t s, const Action& a) const {
  for (std::size_t r = state_begin[s]; r < state_begin[s + 1]; ++r)
    if (actions[r] == a) return r;
  return row_count();
}

UniformizedModel uniformize(const SystemConfig& cfg, const SmdpModel& model) {
  UniformizedModel u;
  u.y = normalization_factor(cfg);
  u.alpha = cfg.alpha;
  u.gamma = u.y / (cfg.alpha + u.y);
  u.state_count = model.state_count;
  u.state_begin = model.state_begin;
  u.actions = model.actions;
  u.rewards.reserve(model.row_count());
  u.rates.reserve(model.row_count());
  u.succ_begin.reserve(model.row_count() + 1);
  u.succ_begin.push_back(0);
  u.succ.reserve(model.succ.size() + model.row_count());

  for (std::size_t s = 0; s < model.state_count; ++s) {
    for (std::size_t r = model.state_begin[s]; r < model.state_begin[s + 1]; ++r) {
      const RewardTerms& t = model.terms[r];
      if (t.beta > u.y)
        throw ContractViolation("uniformize: beta exceeds normalization factor");
      u.rewards.push_back(t.reward * (cfg.alpha + t.beta) / (cfg.alpha + u.y));
      u.rates.push_back(t.beta);

      const double scale = t.beta / u.y;
      double self = 0.0;
      for (std::size_t k = model.succ_begin[r]; k < model.succ_begin[r + 1]; ++k) {
        const Transition& tr = model.succ[k];
        if (tr.next == s) {
          self += tr.probability;
        } else {
          u.succ.push_back({tr.next, tr.probability * scale});
        }
      }
      u.succ.push_back({s, 1.0 - (1.0 - self) * scale});
      u.succ_begin.push_back(u.succ.size());
    }
  }
  return u;
}

void write_model_dump(std::ostream& out, const Scenario& sc, const SmdpModel& model) {
  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  std::ostringstream os;
  os << "# vfc-model-dump v1\n";
  os << "# states=" << model.state_count << " rows=" << model.row_count()
     << " y=" << num(normalization_factor(sc.cfg)) << '\n';
  os << "# columns: state_index\tstate\taction\tbeta\tincome\tcost\treward\t"
        "successors(index:probability,...)\n";
  for (std::size_t s = 0; s < model.state_count; ++s) {
    for (std::size_t r = model.state_begin[s]; r < model.state_begin[s + 1]; ++r) {
      const RewardTerms& t = model.terms[r];
      os << s << '\t' << to_string(sc.index.state(s)) << '\t' << to_string(model.actions[r])
         << '\t' << num(t.beta) << '\t' << num(t.income) << '\t' << num(t.cost) << '\t'
         << num(t.reward) << '\t';
      for (std::size_t k = model.succ_begin[r]; k < model.succ_begin[r + 1]; ++k) {
        if (k != model.succ_begin[r]) os << ',';
        os << model.succ[k].next << ':' << num(model.succ[k].probability);
      }
      os << '\n';
    }
  }
  out << os.str();
}

}  // namespace vfc
