#include "vfc/state.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "vfc/error.hpp"

namespace vfc {
namespace {

int event_code(const Event& e, int n, int n_r) {
  switch (e.kind) {
    case Event::Kind::task_arrival: return 0;
    case Event::Kind::platoon_departure: return e.which;
    case Event::Kind::ru_departure: return n + e.which;
    case Event::Kind::fleet_arrival: return n + n_r + 1;
    case Event::Kind::fleet_departure: return n + n_r + 2;
  }
  return -1;
}

// Events compatible with an occupancy, in enumeration order.
std::vector<Event> consistent_events(const SystemConfig& cfg, const Occupancy& occ) {
  std::vector<Event> out{Event::arrival()};
  for (int i = 1; i <= cfg.n_platoon; ++i)
    if (occ.busy[i - 1]) out.push_back(Event::platoon_done(i));
  for (int j = 1; j <= cfg.n_r; ++j)
    if (occ.ru_tasks[j - 1] > 0) out.push_back(Event::ru_done(j));
  if (occ.fleet < cfg.k_max) out.push_back(Event::fleet_join());
  if (occ.fleet > 0) out.push_back(Event::fleet_leave());
  return out;
}

void enumerate_ru_tasks(const SystemConfig& cfg, std::vector<int>& b, int j, int used,
                        std::vector<std::vector<int>>& out) {
  if (j > cfg.n_r) {
    out.push_back(b);
    return;
  }
  for (int count = 0; used + count * j <= cfg.k_max; ++count) {
    b[j - 1] = count;
    enumerate_ru_tasks(cfg, b, j + 1, used + count * j, out);
  }
  b[j - 1] = 0;
}

int parse_int(std::string_view text) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    throw ContractViolation("expected integer, got '" + std::string(text) + "'");
  return v;
}

}  // namespace

int action_rank(const Action& a, int n_platoon, int n_r) {
  switch (a.kind) {
    case Action::Kind::discard: return 0;
    case Action::Kind::platoon: return a.which;
    case Action::Kind::vfc: return n_platoon + a.which;
    case Action::Kind::noop: return n_platoon + n_r + 1;
  }
  return -1;
}

int Occupancy::used_rus() const {
  int used = 0;
  for (std::size_t r = 0; r < ru_tasks.size(); ++r)
    used += static_cast<int>(r + 1) * ru_tasks[r];
  return used;
}

int Occupancy::busy_vehicles() const {
  return std::accumulate(busy.begin(), busy.end(), 0);
}

Occupancy empty_occupancy(const SystemConfig& cfg, int fleet) {
  Occupancy occ;
  occ.busy.assign(cfg.n_platoon, 0);
  occ.ru_tasks.assign(cfg.n_r, 0);
  occ.fleet = fleet;
  return occ;
}

bool is_feasible(const SystemConfig& cfg, const SystemState& s) {
  const Occupancy& o = s.occ;
  if (static_cast<int>(o.busy.size()) != cfg.n_platoon) return false;
  if (static_cast<int>(o.ru_tasks.size()) != cfg.n_r) return false;
  for (auto n : o.busy)
    if (n > 1) return false;
  for (int b : o.ru_tasks)
    if (b < 0) return false;
  if (o.fleet < 0 || o.fleet > cfg.k_max) return false;
  if (o.used_rus() > o.fleet) return false;

  const Event& e = s.event;
  switch (e.kind) {
    case Event::Kind::task_arrival: return e.which == 0;
    case Event::Kind::platoon_departure:
      return e.which >= 1 && e.which <= cfg.n_platoon && o.busy[e.which - 1] == 1;
    case Event::Kind::ru_departure:
      return e.which >= 1 && e.which <= cfg.n_r && o.ru_tasks[e.which - 1] >= 1;
    case Event::Kind::fleet_arrival: return e.which == 0 && o.fleet < cfg.k_max;
    case Event::Kind::fleet_departure: return e.which == 0 && o.fleet >= 1;
  }
  return false;
}

StateIndex::StateIndex(const SystemConfig& cfg)
    : n_platoon_(cfg.n_platoon), n_r_(cfg.n_r), k_max_(cfg.k_max) {
  // Mixed-radix packing must fit in 64 bits.
  long double span = std::ldexp(1.0L, n_platoon_);
  for (int j = 1; j <= n_r_; ++j) span *= (k_max_ / j + 1);
  span *= (k_max_ + 1) * (n_platoon_ + n_r_ + 3);
  if (span > static_cast<long double>(std::numeric_limits<std::uint64_t>::max() / 2))
    throw ConfigError("state space too large to index");

  std::vector<std::vector<int>> ru_configs;
  std::vector<int> scratch(n_r_, 0);
  enumerate_ru_tasks(cfg, scratch, 1, 0, ru_configs);

  const std::uint32_t masks = 1u << n_platoon_;
  for (std::uint32_t mask = 0; mask < masks; ++mask) {
    Occupancy occ = empty_occupancy(cfg, 0);
    for (int i = 0; i < n_platoon_; ++i)
      occ.busy[i] = static_cast<std::uint8_t>((mask >> (n_platoon_ - 1 - i)) & 1u);
    for (const auto& b : ru_configs) {
      occ.ru_tasks = b;
      for (int m = occ.used_rus(); m <= k_max_; ++m) {
        occ.fleet = m;
        for (const Event& e : consistent_events(cfg, occ)) {
          SystemState s{occ, e};
          lookup_.emplace(key(s), states_.size());
          states_.push_back(std::move(s));
        }
      }
    }
  }
}

std::uint64_t StateIndex::key(const SystemState& s) const {
  std::uint64_t k = 0;
  for (auto bit : s.occ.busy) k = k * 2 + bit;
  for (int j = 1; j <= n_r_; ++j)
    k = k * static_cast<std::uint64_t>(k_max_ / j + 1) +
        static_cast<std::uint64_t>(s.occ.ru_tasks[j - 1]);
  k = k * static_cast<std::uint64_t>(k_max_ + 1) + static_cast<std::uint64_t>(s.occ.fleet);
  k = k * static_cast<std::uint64_t>(n_platoon_ + n_r_ + 3) +
      static_cast<std::uint64_t>(event_code(s.event, n_platoon_, n_r_));
  return k;
}

std::size_t StateIndex::find(const SystemState& s) const {
  if (static_cast<int>(s.occ.busy.size()) != n_platoon_ ||
      static_cast<int>(s.occ.ru_tasks.size()) != n_r_)
    return size();
  for (int j = 1; j <= n_r_; ++j)
    if (s.occ.ru_tasks[j - 1] < 0 || s.occ.ru_tasks[j - 1] > k_max_ / j) return size();
  if (s.occ.fleet < 0 || s.occ.fleet > k_max_) return size();
  for (auto bit : s.occ.busy)
    if (bit > 1) return size();
  const auto it = lookup_.find(key(s));
  if (it == lookup_.end() || !(states_[it->second] == s)) return size();
  return it->second;
}

bool StateIndex::contains(const SystemState& s) const { return find(s) < size(); }

std::size_t StateIndex::index_of(const SystemState& s) const {
  const std::size_t i = find(s);
  if (i == size()) throw ContractViolation("state not in index: " + to_string(s));
  return i;
}

StateIndex enumerate_states(const SystemConfig& cfg) { return StateIndex(cfg); }

std::vector<Action> feasible_actions(const SystemConfig& cfg, const SystemState& s) {
  if (s.event.kind != Event::Kind::task_arrival) return {Action::noop()};
  std::vector<Action> out{Action::discard()};
  for (int i = 1; i <= cfg.n_platoon; ++i)
    if (!s.occ.busy[i - 1]) out.push_back(Action::platoon(i));
  const int free_rus = s.occ.fleet - s.occ.used_rus();
  for (int j = 1; j <= cfg.n_r && j <= free_rus; ++j) out.push_back(Action::vfc(j));
  return out;
}

bool is_feasible_action(const SystemConfig& cfg, const SystemState& s, const Action& a) {
  if (s.event.kind != Event::Kind::task_arrival) return a.kind == Action::Kind::noop;
  switch (a.kind) {
    case Action::Kind::discard: return true;
    case Action::Kind::platoon:
      return a.which >= 1 && a.which <= cfg.n_platoon && !s.occ.busy[a.which - 1];
    case Action::Kind::vfc:
      return a.which >= 1 && a.which <= cfg.n_r &&
             s.occ.used_rus() + a.which <= s.occ.fleet;
    case Action::Kind::noop: return false;
  }
  return false;
}

Occupancy apply_dynamics(const SystemConfig& cfg, const SystemState& s, const Action& a) {
  if (!is_feasible(cfg, s))
    throw ContractViolation("apply_dynamics: infeasible state " + to_string(s));
  if (!is_feasible_action(cfg, s, a))
    throw ContractViolation("apply_dynamics: action " + to_string(a) +
                            " not feasible in " + to_string(s));
  Occupancy next = s.occ;
  apply_in_place(cfg, next, s.event, a);
  return next;
}

void apply_in_place(const SystemConfig& cfg, Occupancy& occ, const Event& event,
                    const Action& a) {
  switch (event.kind) {
    case Event::Kind::task_arrival:
      if (a.kind == Action::Kind::platoon) occ.busy[a.which - 1] = 1;
      if (a.kind == Action::Kind::vfc) occ.ru_tasks[a.which - 1] += 1;
      break;
    case Event::Kind::platoon_departure:
      occ.busy[event.which - 1] = 0;
      break;
    case Event::Kind::ru_departure:
      occ.ru_tasks[event.which - 1] -= 1;
      break;
    case Event::Kind::fleet_arrival:
      occ.fleet += 1;
      break;
    case Event::Kind::fleet_departure:
      if (departure_interrupts(occ)) {
        for (int j = cfg.n_r; j >= 1; --j) {
          if (occ.ru_tasks[j - 1] > 0) {
            occ.ru_tasks[j - 1] -= 1;
            break;
          }
        }
      }
      occ.fleet -= 1;
      break;
  }
}

std::string to_string(const Event& e) {
  switch (e.kind) {
    case Event::Kind::task_arrival: return "A";
    case Event::Kind::platoon_departure: return "D" + std::to_string(e.which);
    case Event::Kind::ru_departure: return "L" + std::to_string(e.which);
    case Event::Kind::fleet_arrival: return "F+1";
    case Event::Kind::fleet_departure: return "F-1";
  }
  return "?";
}

std::string to_string(const Action& a) {
  switch (a.kind) {
    case Action::Kind::discard: return "discard";
    case Action::Kind::platoon: return "platoon:" + std::to_string(a.which);
    case Action::Kind::vfc: return "vfc:" + std::to_string(a.which);
    case Action::Kind::noop: return "noop";
  }
  return "?";
}

std::string to_string(const SystemState& s) {
  std::string out = "n=";
  for (auto bit : s.occ.busy) out += bit ? '1' : '0';
  out += ";b=";
  for (std::size_t j = 0; j < s.occ.ru_tasks.size(); ++j) {
    if (j) out += ',';
    out += std::to_string(s.occ.ru_tasks[j]);
  }
  out += ";m=" + std::to_string(s.occ.fleet) + ";e=" + to_string(s.event);
  return out;
}

Event parse_event(std::string_view t) {
  if (t == "A") return Event::arrival();
  if (t == "F+1") return Event::fleet_join();
  if (t == "F-1") return Event::fleet_leave();
  if (t.size() >= 2 && t[0] == 'D') return Event::platoon_done(parse_int(t.substr(1)));
  if (t.size() >= 2 && t[0] == 'L') return Event::ru_done(parse_int(t.substr(1)));
  throw ContractViolation("unknown event '" + std::string(t) + "'");
}

Action parse_action(std::string_view t) {
  if (t == "discard") return Action::discard();
  if (t == "noop") return Action::noop();
  if (t.starts_with("platoon:")) return Action::platoon(parse_int(t.substr(8)));
  if (t.starts_with("vfc:")) return Action::vfc(parse_int(t.substr(4)));
  throw ContractViolation("unknown action '" + std::string(t) + "'");
}

SystemState parse_state(std::string_view t) {
  SystemState s;
  bool have_n = false, have_b = false, have_m = false, have_e = false;
  while (!t.empty()) {
    const auto semi = t.find(';');
    std::string_view field = t.substr(0, semi);
    t = semi == std::string_view::npos ? std::string_view{} : t.substr(semi + 1);
    if (field.starts_with("n=")) {
      for (char c : field.substr(2)) {
        if (c != '0' && c != '1') throw ContractViolation("bad occupancy bits");
        s.occ.busy.push_back(static_cast<std::uint8_t>(c - '0'));
      }
      have_n = true;
    } else if (field.starts_with("b=")) {
      std::string_view list = field.substr(2);
      while (true) {
        const auto comma = list.find(',');
        s.occ.ru_tasks.push_back(parse_int(list.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        list.remove_prefix(comma + 1);
      }
      have_b = true;
    } else if (field.starts_with("m=")) {
      s.occ.fleet = parse_int(field.substr(2));
      have_m = true;
    } else if (field.starts_with("e=")) {
      s.event = parse_event(field.substr(2));
      have_e = true;
    } else {
      throw ContractViolation("bad state field '" + std::string(field) + "'");
    }
  }
  if (!(have_n && have_b && have_m && have_e))
    throw ContractViolation("state is missing a field");
  return s;
}

}  // namespace vfc
