#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "oracles.hpp"
#include "vfc/error.hpp"
#include "vfc/solver.hpp"

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

struct Built {
  Scenario sc;
  UniformizedModel um;
};

Built build(const SystemConfig& cfg) {
  Scenario sc = Scenario::build(cfg);
  UniformizedModel um = uniformize(cfg, build_model(sc));
  return {std::move(sc), std::move(um)};
}

UniformizedModel single_state(double reward, double gamma) {
  UniformizedModel m;
  m.y = 1.0;
  m.gamma = gamma;
  m.alpha = (1 - gamma) / gamma;
  m.state_count = 1;
  m.state_begin = {0, 1};
  m.actions = {Action::noop()};
  m.rewards = {reward};
  m.rates = {1.0};
  m.succ_begin = {0, 1};
  m.succ = {{0, 1.0}};
  return m;
}

double envelope(const SolveResult& r, double gamma) { return 2 * r.threshold / (1 - gamma); }

}  // namespace

TEST(ValueIteration, ZeroRewards) {
  const SolveResult r = value_iteration(single_state(0.0, 0.9), 1.0);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_EQ(r.values[0], 0.0);
}

TEST(ValueIteration, GeometricSeries) {
  const SolveResult r = value_iteration(single_state(1.0, 0.9), 1e-9);
  EXPECT_NEAR(r.values[0], 10.0, 1e-8);
}

TEST(ValueIteration, BudgetExhaustion) {
  SolveOptions opt;
  opt.max_sweeps = 3;
  try {
    value_iteration(single_state(1.0, 0.9), 1e-9, opt);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.residual_trace().size(), 3u);
  }
}

TEST(ValueIteration, TinyMatchesBruteForce) {
  const Built b = build(tiny());
  const auto best = oracle::enumerate_policies(b.um);
  const SolveResult vi = value_iteration(b.um, b.sc.cfg.epsilon);
  const SolveResult tight = value_iteration(b.um, 1e-7);
  for (std::size_t s = 0; s < b.um.state_count; ++s) {
    EXPECT_EQ(vi.policy[s], b.um.actions[best.rows[s]]) << to_string(b.sc.index.state(s));
    EXPECT_NEAR(tight.values[s], best.values[s], 1e-6 * std::abs(best.values[s]));
    EXPECT_NEAR(vi.values[s], best.values[s], envelope(vi, b.um.gamma));
  }
  const auto exact = evaluate_policy(b.um, StationaryPolicy::deterministic(vi.policy));
  for (std::size_t s = 0; s < b.um.state_count; ++s)
    EXPECT_NEAR(exact[s], best.values[s], 1e-9 * std::abs(best.values[s]));
}

TEST(ValueIteration, ContractionAndStoppingRule) {
  const Built b = build(tiny());
  const SolveResult r = value_iteration(b.um, b.sc.cfg.epsilon);
  ASSERT_EQ(r.residual_trace.size(), static_cast<std::size_t>(r.iterations));
  double vmax = 1.0;
  for (double v : r.values) vmax = std::max(vmax, std::abs(v));
  // Near convergence the difference is almost a constant shift, which
  // contracts by exactly gamma; allow summation round-off on |v|.
  const double slack = 64 * std::numeric_limits<double>::epsilon() * vmax;
  for (std::size_t l = 1; l < r.residual_trace.size(); ++l)
    EXPECT_LE(r.residual_trace[l], b.um.gamma * r.residual_trace[l - 1] + slack);
  EXPECT_LT(r.final_residual, r.threshold);
  EXPECT_DOUBLE_EQ(r.threshold, b.sc.cfg.epsilon * (1 - b.um.gamma) / (2 * b.um.gamma));
}

TEST(ValueIteration, ArgmaxInvariantUnderScaling) {
  const Built b = build(tiny());
  UniformizedModel scaled = b.um;
  for (double& r : scaled.rewards) r *= 2.0;
  const SolveResult a = value_iteration(b.um, 1e-6);
  const SolveResult c = value_iteration(scaled, 2e-6);
  EXPECT_EQ(a.policy, c.policy);
  EXPECT_EQ(extract_policy(b.um, a.values), extract_policy(scaled, c.values));
}

TEST(ValueIteration, PolicyIsFeasible) {
  SystemConfig cfg;
  cfg.k_max = 4;
  const Built b = build(cfg);
  const SolveResult r = value_iteration(b.um, cfg.epsilon);
  for (std::size_t s = 0; s < b.um.state_count; ++s)
    EXPECT_TRUE(is_feasible_action(cfg, b.sc.index.state(s), r.policy[s]));
}

TEST(EvaluatePolicy, MatchesDenseSolve) {
  const Built b = build(tiny());
  // Always discard at arrivals.
  std::vector<std::size_t> rows(b.um.state_count);
  std::vector<Action> acts(b.um.state_count);
  for (std::size_t s = 0; s < rows.size(); ++s) {
    rows[s] = b.um.state_begin[s];
    acts[s] = b.um.actions[rows[s]];
  }
  const Eigen::VectorXd want = oracle::evaluate_rows(b.um, rows);
  const auto got = evaluate_policy(b.um, StationaryPolicy::deterministic(acts));
  for (std::size_t s = 0; s < rows.size(); ++s)
    EXPECT_NEAR(got[s], want[s], 1e-9 * std::abs(want[s]));
}

TEST(EvaluatePolicy, RandomizedPolicyDrawsOncePerEpoch) {
  SystemConfig small;
  small.n_platoon = 2;
  small.f_platoon = {600.0, 640.0};
  small.n_r = 2;
  small.k_max = 3;
  for (const SystemConfig& cfg : {tiny(), small}) {
    const Scenario sc = Scenario::build(cfg);
    const SmdpModel raw = build_model(sc);
    const UniformizedModel um = uniformize(cfg, raw);
    for (const StationaryPolicy& pi :
         {equal_probability_policy(cfg, sc.index), greedy_policy(cfg, sc.index)}) {
      const Eigen::VectorXd want = oracle::evaluate_semi_markov(raw, cfg.alpha, pi);
      const auto got = evaluate_policy(um, pi);
      for (std::size_t s = 0; s < got.size(); ++s)
        EXPECT_NEAR(got[s], want[s], 1e-9 * std::abs(want[s]));
    }
  }
}

TEST(EvaluatePolicy, OptimalDominatesBaselines) {
  SystemConfig k4;
  k4.k_max = 4;
  for (const SystemConfig& cfg : {tiny(), k4}) {
    const Built b = build(cfg);
    const SolveResult r = value_iteration(b.um, cfg.epsilon);
    const auto v = evaluate_policy(b.um, StationaryPolicy::deterministic(r.policy));
    const double tol = envelope(r, b.um.gamma);
    for (const StationaryPolicy& pi : {greedy_policy(cfg, b.sc.index),
                                       equal_probability_policy(cfg, b.sc.index)}) {
      const auto w = evaluate_policy(b.um, pi);
      for (std::size_t s = 0; s < v.size(); ++s) EXPECT_GE(v[s] + tol, w[s]);
    }
    for (std::size_t s = 0; s < v.size(); ++s) EXPECT_NEAR(v[s], r.values[s], tol);
  }
}

TEST(EvaluatePolicy, RejectsMismatchedPolicy) {
  const Built b = build(tiny());
  StationaryPolicy pi;
  EXPECT_THROW(evaluate_policy(b.um, pi), ContractViolation);
}

TEST(OccupancyDistribution, IsAProbabilityVector) {
  const Built b = build(tiny());
  const auto p = occupancy_distribution(b.um, greedy_policy(b.sc.cfg, b.sc.index));
  double sum = 0.0;
  for (double x : p) {
    EXPECT_GE(x, 0.0);
    sum += x;
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(OccupancyDistribution, MatchesSemiMarkovTimeFractions) {
  SystemConfig small;
  small.n_platoon = 2;
  small.f_platoon = {600.0, 640.0};
  small.n_r = 2;
  small.k_max = 3;
  for (const SystemConfig& cfg : {tiny(), small}) {
    const Scenario sc = Scenario::build(cfg);
    const SmdpModel raw = build_model(sc);
    const UniformizedModel um = uniformize(cfg, raw);
    for (const StationaryPolicy& pi :
         {equal_probability_policy(cfg, sc.index), greedy_policy(cfg, sc.index)}) {
      const Eigen::VectorXd want = oracle::time_stationary(raw, pi);
      const auto got = occupancy_distribution(um, pi);
      for (std::size_t s = 0; s < got.size(); ++s) EXPECT_NEAR(got[s], want[s], 1e-9);
    }
  }
}

TEST(Baselines, Greedy) {
  const SystemConfig cfg;
  const StateIndex idx(cfg);
  const StationaryPolicy g = greedy_policy(cfg, idx);
  auto pick = [&](const char* s) {
    const auto& c = g.choices[idx.index_of(parse_state(s))];
    EXPECT_EQ(c.size(), 1u);
    return to_string(c.front().action);
  };
  EXPECT_EQ(pick("n=0000;b=0,0,0;m=6;e=A"), "platoon:2");
  EXPECT_EQ(pick("n=0100;b=0,0,0;m=6;e=A"), "platoon:4");
  EXPECT_EQ(pick("n=1111;b=1,1,0;m=5;e=A"), "vfc:2");
  EXPECT_EQ(pick("n=1111;b=0,0,0;m=6;e=A"), "vfc:3");
  EXPECT_EQ(pick("n=1111;b=1,1,0;m=3;e=A"), "discard");
  EXPECT_EQ(pick("n=1111;b=1,1,0;m=3;e=L1"), "noop");
}

TEST(Baselines, EqualProbability) {
  const SystemConfig cfg;
  const StateIndex idx(cfg);
  const StationaryPolicy e = equal_probability_policy(cfg, idx);
  const auto& empty = e.choices[idx.index_of(parse_state("n=0000;b=0,0,0;m=6;e=A"))];
  ASSERT_EQ(empty.size(), 8u);
  for (const auto& c : empty) EXPECT_DOUBLE_EQ(c.probability, 0.125);
  const auto& full = e.choices[idx.index_of(parse_state("n=1111;b=1,1,0;m=3;e=A"))];
  ASSERT_EQ(full.size(), 1u);
  EXPECT_EQ(full[0].action, Action::discard());
  const auto& l2 = e.choices[idx.index_of(parse_state("n=0000;b=0,1,0;m=3;e=L2"))];
  ASSERT_EQ(l2.size(), 1u);
  EXPECT_EQ(l2[0].action, Action::noop());
}

TEST(PolicyDump, RoundTrip) {
  const Built b = build(tiny());
  const SolveResult r = value_iteration(b.um, b.sc.cfg.epsilon);
  std::ostringstream os;
  write_policy_dump(os, b.sc.index, r.policy);
  std::istringstream is(os.str());
  EXPECT_EQ(read_policy_dump(is, b.sc.cfg, b.sc.index), r.policy);
}

TEST(PolicyDump, RejectsMissingAndInfeasible) {
  const Built b = build(tiny());
  const SolveResult r = value_iteration(b.um, b.sc.cfg.epsilon);
  std::ostringstream os;
  write_policy_dump(os, b.sc.index, r.policy);
  std::string text = os.str();
  std::istringstream truncated(text.substr(0, text.rfind('\n', text.size() - 2) + 1));
  EXPECT_THROW(read_policy_dump(truncated, b.sc.cfg, b.sc.index), Error);
  std::istringstream bad("# state\taction\nn=1;b=0;m=0;e=A\tplatoon:1\n");
  EXPECT_THROW(read_policy_dump(bad, b.sc.cfg, b.sc.index), Error);
}
