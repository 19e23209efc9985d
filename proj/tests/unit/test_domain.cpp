#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "oracles.hpp"
#include "vfc/config.hpp"
#include "vfc/error.hpp"
#include "vfc/state.hpp"

using namespace vfc;

namespace {

SystemConfig tiny() {
  SystemConfig c;
  c.n_platoon = 1;
  c.f_platoon = {600.0};
  c.n_r = 1;
  c.k_max = 1;
  return c;
}

SystemConfig with(int n, int n_r, int k) {
  SystemConfig c;
  c.n_platoon = n;
  c.f_platoon.assign(n, 600.0);
  c.n_r = n_r;
  c.k_max = k;
  return c;
}

std::set<std::string> names(const std::vector<Action>& as) {
  std::set<std::string> out;
  for (const Action& a : as) out.insert(to_string(a));
  return out;
}

}  // namespace

TEST(Config, DefaultsValidate) { EXPECT_NO_THROW(SystemConfig{}.validate()); }

TEST(Config, RoundTrip) {
  SystemConfig c;
  c.lambda_p = 13.25;
  c.dcf.bit_rate = 12e6;
  std::ostringstream os;
  write_config(os, c);
  std::istringstream is(os.str());
  const SystemConfig back = parse_config(is);
  std::ostringstream again;
  write_config(again, back);
  EXPECT_EQ(os.str(), again.str());
  EXPECT_EQ(back.lambda_p, 13.25);
}

TEST(Config, CommentsAndBlankLines) {
  std::istringstream is("# scenario\n\nk_max = 8   # larger fleet\nlambda_p=13\n");
  const SystemConfig c = parse_config(is);
  EXPECT_EQ(c.k_max, 8);
  EXPECT_EQ(c.lambda_p, 13.0);
  EXPECT_EQ(c.d, 40.0);
}

TEST(Config, ErrorsCarryLineNumbers) {
  auto message = [](const std::string& text) {
    std::istringstream is(text);
    try {
      parse_config(is);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message("k_max = 5\nbogus = 1\n").find("line 2"), std::string::npos);
  EXPECT_NE(message("\n\nd = forty\n").find("line 3"), std::string::npos);
  EXPECT_NE(message("d = 1\nd = 2\n").find("line 2"), std::string::npos);
  EXPECT_NE(message("just text\n").find("line 1"), std::string::npos);
  EXPECT_NE(message("bogus = 1\n").find("bogus"), std::string::npos);
}

TEST(Config, InvariantViolations) {
  auto rejects = [](auto mutate) {
    SystemConfig c;
    mutate(c);
    EXPECT_THROW(c.validate(), ConfigError);
  };
  rejects([](SystemConfig& c) { c.f_platoon[2] = 300.0; });
  rejects([](SystemConfig& c) { c.n_r = 7; });
  rejects([](SystemConfig& c) { c.lambda_p = 0.0; });
  rejects([](SystemConfig& c) { c.f_platoon.pop_back(); });
  rejects([](SystemConfig& c) { c.dcf.bit_rate = -1.0; });
  rejects([](SystemConfig& c) { c.alpha = 0.0; });
}

TEST(StateIndex, TinyInstanceHandCount) {
  // n in {0,1} x (B, m) in {(0,0), (0,1), (1,1)}: 6 arrival states,
  // 3 with D1, 2 with L1, 2 with F+1 (m = 0), 4 with F-1 (m = 1).
  const StateIndex idx(tiny());
  EXPECT_EQ(idx.size(), 17u);
  EXPECT_EQ(idx.size(), oracle::count_states(1, 1, 1));
}

TEST(StateIndex, MatchesCombinatorialCount) {
  for (int n = 1; n <= 4; ++n)
    for (int n_r = 1; n_r <= 3; ++n_r)
      for (int k = n_r; k <= 10; ++k)
        EXPECT_EQ(StateIndex(with(n, n_r, k)).size(), oracle::count_states(n, n_r, k))
            << n << ' ' << n_r << ' ' << k;
  EXPECT_EQ(StateIndex(SystemConfig{}).size(), 6016u);
}

TEST(StateIndex, EveryStateFeasibleAndIndexed) {
  const SystemConfig cfg;
  const StateIndex idx(cfg);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const SystemState& s = idx.state(i);
    EXPECT_TRUE(is_feasible(cfg, s));
    EXPECT_LE(s.occ.used_rus(), s.occ.fleet);
    EXPECT_EQ(idx.index_of(s), i);
    EXPECT_EQ(parse_state(to_string(s)), s);
  }
}

TEST(StateIndex, RejectsInfeasible) {
  const SystemConfig cfg;
  const StateIndex idx(cfg);
  EXPECT_THROW(idx.index_of(parse_state("n=0000;b=0,0,0;m=2;e=D1")), ContractViolation);
  EXPECT_FALSE(idx.contains(parse_state("n=0000;b=0,1,0;m=1;e=A")));
  EXPECT_FALSE(idx.contains(parse_state("n=0000;b=0,0,0;m=6;e=F+1")));
  EXPECT_FALSE(idx.contains(parse_state("n=0000;b=0,0,0;m=0;e=F-1")));
}

TEST(Actions, EmptySystem) {
  const SystemConfig cfg;
  const SystemState s{empty_occupancy(cfg, 6), Event::arrival()};
  const auto acts = feasible_actions(cfg, s);
  std::vector<std::string> got;
  for (const Action& a : acts) got.push_back(to_string(a));
  EXPECT_EQ(got, (std::vector<std::string>{"discard", "platoon:1", "platoon:2", "platoon:3",
                                           "platoon:4", "vfc:1", "vfc:2", "vfc:3"}));
}

TEST(Actions, NothingFree) {
  const SystemConfig cfg;
  const auto s = parse_state("n=1111;b=1,1,0;m=3;e=A");
  EXPECT_EQ(names(feasible_actions(cfg, s)), std::set<std::string>{"discard"});
}

TEST(Actions, NonArrivalEventsOnlyNoop) {
  const SystemConfig cfg;
  const StateIndex idx(cfg);
  for (const SystemState& s : idx.states()) {
    const auto acts = feasible_actions(cfg, s);
    ASSERT_FALSE(acts.empty());
    if (s.event.kind != Event::Kind::task_arrival) {
      ASSERT_EQ(acts.size(), 1u);
      EXPECT_EQ(acts[0], Action::noop());
    } else {
      for (const Action& a : acts) EXPECT_NE(a, Action::noop());
      EXPECT_EQ(acts.front(), Action::discard());
    }
    for (std::size_t i = 1; i < acts.size(); ++i)
      EXPECT_LT(action_rank(acts[i - 1], 4, 3), action_rank(acts[i], 4, 3));
  }
}

TEST(Dynamics, Examples) {
  const SystemConfig cfg;
  EXPECT_EQ(apply_dynamics(cfg, parse_state("n=0000;b=0,0,0;m=5;e=A"), Action::platoon(2)),
            parse_state("n=0100;b=0,0,0;m=5;e=A").occ);
  EXPECT_EQ(apply_dynamics(cfg, parse_state("n=1010;b=1,0,0;m=4;e=L1"), Action::noop()),
            parse_state("n=1010;b=0,0,0;m=4;e=A").occ);
  EXPECT_EQ(apply_dynamics(cfg, parse_state("n=0000;b=0,1,0;m=2;e=F-1"), Action::noop()),
            parse_state("n=0000;b=0,0,0;m=1;e=A").occ);
  EXPECT_EQ(apply_dynamics(cfg, parse_state("n=0000;b=0,1,0;m=3;e=F-1"), Action::noop()),
            parse_state("n=0000;b=0,1,0;m=2;e=A").occ);
  EXPECT_EQ(apply_dynamics(cfg, parse_state("n=0000;b=1,0,0;m=3;e=A"), Action::vfc(2)),
            parse_state("n=0000;b=1,1,0;m=3;e=A").occ);
  EXPECT_EQ(apply_dynamics(cfg, parse_state("n=0001;b=0,0,0;m=3;e=D4"), Action::noop()),
            parse_state("n=0000;b=0,0,0;m=3;e=A").occ);
  EXPECT_EQ(apply_dynamics(cfg, parse_state("n=0000;b=0,0,0;m=3;e=F+1"), Action::noop()),
            parse_state("n=0000;b=0,0,0;m=4;e=A").occ);
  // Largest class goes first when several are in use.
  EXPECT_EQ(apply_dynamics(cfg, parse_state("n=0000;b=1,1,1;m=6;e=F-1"), Action::noop()),
            parse_state("n=0000;b=1,1,0;m=5;e=A").occ);
}

TEST(Dynamics, InfeasibleActionThrows) {
  const SystemConfig cfg;
  EXPECT_THROW(apply_dynamics(cfg, parse_state("n=0100;b=0,0,0;m=5;e=A"), Action::platoon(2)),
               ContractViolation);
  EXPECT_THROW(apply_dynamics(cfg, parse_state("n=0000;b=0,0,0;m=2;e=A"), Action::vfc(3)),
               ContractViolation);
  EXPECT_THROW(apply_dynamics(cfg, parse_state("n=0000;b=0,0,0;m=2;e=F+1"), Action::discard()),
               ContractViolation);
}

TEST(Dynamics, ClosedUnderEveryFeasiblePair) {
  // Every post-action occupancy, combined with any event it can raise,
  // lands back inside the index.
  for (const SystemConfig& cfg : {SystemConfig{}, tiny(), with(2, 2, 5)}) {
    const StateIndex idx(cfg);
    for (const SystemState& s : idx.states())
      for (const Action& a : feasible_actions(cfg, s)) {
        const Occupancy o = apply_dynamics(cfg, s, a);
        EXPECT_LE(o.used_rus(), o.fleet);
        EXPECT_TRUE(idx.contains({o, Event::arrival()})) << to_string(s);
        EXPECT_EQ(apply_dynamics(cfg, s, a), o);
      }
  }
}

TEST(Parsing, RoundTripAndErrors) {
  for (const char* e : {"A", "D3", "L2", "F+1", "F-1"}) EXPECT_EQ(to_string(parse_event(e)), e);
  for (const char* a : {"discard", "platoon:4", "vfc:2", "noop"})
    EXPECT_EQ(to_string(parse_action(a)), a);
  EXPECT_THROW(parse_event("Q"), ContractViolation);
  EXPECT_THROW(parse_action("vfc:"), ContractViolation);
  EXPECT_THROW(parse_state("n=10;m=1"), ContractViolation);
}
