#include "vfc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

#include "vfc/error.hpp"

namespace vfc {
namespace {

constexpr double kEvaluationTolerance = 1e-10;

double sup_norm(const std::vector<double>& a) {
  double d = 0.0;
  for (double x : a) d = std::max(d, std::abs(x));
  return d;
}

// Policy-averaged reward and transition matrix of the uniformized chain.
//
// A randomized policy draws its action once per real decision epoch, and
// the sojourn that follows depends on the action. Mixing uniformized rows
// with weights p_a / (offset + beta_a) reproduces that exactly: offset =
// alpha gives the discounted value, offset = 0 the time-stationary law.
// For a deterministic choice the weight is 1 whatever the offset.
struct PolicyChain {
  std::vector<double> reward;
  Eigen::SparseMatrix<double, Eigen::RowMajor> transition;
};

PolicyChain policy_chain(const UniformizedModel& model, const StationaryPolicy& pi,
                         double offset) {
  validate_policy(model, pi);
  const auto n = static_cast<Eigen::Index>(model.state_count);
  PolicyChain chain;
  chain.reward.assign(model.state_count, 0.0);
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(model.succ.size());
  std::vector<std::pair<std::size_t, double>> weights;
  for (std::size_t s = 0; s < model.state_count; ++s) {
    weights.clear();
    double total = 0.0;
    for (const ActionProbability& ap : pi.choices[s]) {
      if (ap.probability == 0.0) continue;
      const std::size_t r = model.find_row(s, ap.action);
      const double w = ap.probability / (offset + model.rates[r]);
      weights.emplace_back(r, w);
      total += w;
    }
    for (auto [r, w] : weights) {
      const double share = weights.size() == 1 ? 1.0 : w / total;
      chain.reward[s] += share * model.rewards[r];
      for (std::size_t k = model.succ_begin[r]; k < model.succ_begin[r + 1]; ++k)
        entries.emplace_back(static_cast<Eigen::Index>(s),
                             static_cast<Eigen::Index>(model.succ[k].next),
                             share * model.succ[k].probability);
    }
  }
  chain.transition.resize(n, n);
  chain.transition.setFromTriplets(entries.begin(), entries.end());
  return chain;
}

}  // namespace

StationaryPolicy StationaryPolicy::deterministic(const std::vector<Action>& actions) {
  StationaryPolicy pi;
  pi.choices.reserve(actions.size());
  for (const Action& a : actions) pi.choices.push_back({{a, 1.0}});
  return pi;
}

std::vector<Action> extract_policy(const UniformizedModel& model,
                                   const std::vector<double>& values) {
  std::vector<Action> policy(model.state_count);
  for (std::size_t s = 0; s < model.state_count; ++s) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_row = model.state_begin[s];
    for (std::size_t r = model.state_begin[s]; r < model.state_begin[s + 1]; ++r) {
      double acc = 0.0;
      for (std::size_t k = model.succ_begin[r]; k < model.succ_begin[r + 1]; ++k)
        acc += model.succ[k].probability * values[model.succ[k].next];
      const double q = model.rewards[r] + model.gamma * acc;
      if (q > best) {
        best = q;
        best_row = r;
      }
    }
    policy[s] = model.actions[best_row];
  }
  return policy;
}

SolveResult value_iteration(const UniformizedModel& model, double epsilon,
                            const SolveOptions& options) {
  if (!(epsilon > 0)) throw ContractViolation("value_iteration: epsilon must be > 0");
  const std::size_t n = model.state_count;
  const double gamma = model.gamma;

  SolveResult result;
  result.threshold = epsilon * (1.0 - gamma) / (2.0 * gamma);
  std::vector<double> current(n, 0.0);
  std::vector<double> next(n, 0.0);

  double previous_delta = std::numeric_limits<double>::infinity();
  for (std::int64_t sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    double delta = 0.0;
#pragma omp parallel for reduction(max : delta) schedule(static)
    for (std::int64_t si = 0; si < static_cast<std::int64_t>(n); ++si) {
      const auto s = static_cast<std::size_t>(si);
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t r = model.state_begin[s]; r < model.state_begin[s + 1]; ++r) {
        double acc = 0.0;
        for (std::size_t k = model.succ_begin[r]; k < model.succ_begin[r + 1]; ++k)
          acc += model.succ[k].probability * current[model.succ[k].next];
        best = std::max(best, model.rewards[r] + gamma * acc);
      }
      next[s] = best;
      delta = std::max(delta, std::abs(best - current[s]));
    }
    result.residual_trace.push_back(delta);
    result.iterations = sweep;
    result.final_residual = delta;
    current.swap(next);

    if (options.check_contraction && sweep > 1) {
      const double slack = 64.0 * std::numeric_limits<double>::epsilon() *
                           std::max(1.0, sup_norm(current));
      if (delta > gamma * previous_delta + slack) {
        std::ostringstream os;
        os << "value iteration lost contraction at sweep " << sweep << " (" << delta
           << " > " << gamma << " * " << previous_delta << ")";
        throw ConvergenceError(os.str(), result.residual_trace);
      }
    }
    previous_delta = delta;
    if (delta < result.threshold) {
      result.values = std::move(current);
      result.policy = extract_policy(model, result.values);
      return result;
    }
  }
  std::ostringstream os;
  os << "value iteration did not reach threshold " << result.threshold << " within "
     << options.max_sweeps << " sweeps (last residual " << result.final_residual << ")";
  throw ConvergenceError(os.str(), std::move(result.residual_trace));
}

void validate_policy(const UniformizedModel& model, const StationaryPolicy& pi) {
  if (pi.size() != model.state_count)
    throw ContractViolation("policy covers " + std::to_string(pi.size()) +
                            " states, model has " + std::to_string(model.state_count));
  for (std::size_t s = 0; s < model.state_count; ++s) {
    double total = 0.0;
    for (const ActionProbability& ap : pi.choices[s]) {
      if (!(ap.probability >= 0.0))
        throw ContractViolation("negative probability in policy at state " +
                                std::to_string(s));
      if (model.find_row(s, ap.action) == model.row_count())
        throw ContractViolation("policy uses infeasible action " + to_string(ap.action) +
                                " at state " + std::to_string(s));
      total += ap.probability;
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw ContractViolation("policy distribution at state " + std::to_string(s) +
                              " does not sum to one");
  }
}

std::vector<double> evaluate_policy(const UniformizedModel& model,
                                    const StationaryPolicy& pi) {
  const PolicyChain chain = policy_chain(model, pi, model.alpha);
  const auto n = static_cast<Eigen::Index>(model.state_count);
  const double gamma = model.gamma;

  Eigen::SparseMatrix<double> system(n, n);
  system.setIdentity();
  system -= gamma * Eigen::SparseMatrix<double>(chain.transition);
  system.makeCompressed();

  const Eigen::Map<const Eigen::VectorXd> rhs(chain.reward.data(), n);
  Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> solver;
  solver.setTolerance(1e-15);
  solver.setMaxIterations(4 * static_cast<int>(std::min<Eigen::Index>(n, 100000)) + 100);
  solver.compute(system);
  if (solver.info() != Eigen::Success)
    throw ConvergenceError("evaluate_policy: preconditioner setup failed", {});

  Eigen::VectorXd v = solver.solve(rhs);
  std::vector<double> trace;
  // Residual refinement: v += A^{-1} (R + gamma P v - v).
  for (int round = 0; round < 50; ++round) {
    const Eigen::VectorXd residual = rhs + gamma * (chain.transition * v) - v;
    const double norm = residual.lpNorm<Eigen::Infinity>();
    trace.push_back(norm);
    if (norm <= kEvaluationTolerance) return {v.data(), v.data() + v.size()};
    if (!std::isfinite(norm)) break;
    const Eigen::VectorXd correction = solver.solve(residual);
    if (correction.allFinite()) {
      v += correction;
    } else {
      // Plain contraction step as a fallback.
      v = rhs + gamma * (chain.transition * v);
    }
  }
  throw ConvergenceError("evaluate_policy: residual did not reach 1e-10", std::move(trace));
}

std::vector<double> occupancy_distribution(const UniformizedModel& model,
                                           const StationaryPolicy& pi) {
  const PolicyChain chain = policy_chain(model, pi, 0.0);
  const auto n = static_cast<Eigen::Index>(model.state_count);
  const Eigen::SparseMatrix<double, Eigen::RowMajor> transposed = chain.transition.transpose();

  Eigen::VectorXd dist = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  for (int it = 0; it < 1'000'000; ++it) {
    Eigen::VectorXd step = transposed * dist;
    step /= step.sum();
    const double change = (step - dist).lpNorm<1>();
    dist = std::move(step);
    if (change < 1e-13) return {dist.data(), dist.data() + dist.size()};
  }
  throw ConvergenceError("occupancy_distribution: power iteration did not settle", {});
}

StationaryPolicy greedy_policy(const SystemConfig& cfg, const StateIndex& index) {
  std::vector<Action> actions;
  actions.reserve(index.size());
  for (const SystemState& s : index.states()) {
    if (s.event.kind != Event::Kind::task_arrival) {
      actions.push_back(Action::noop());
      continue;
    }
    int best_vehicle = 0;
    for (int i = 1; i <= cfg.n_platoon; ++i) {
      if (s.occ.busy[i - 1]) continue;
      if (best_vehicle == 0 || cfg.f_platoon[i - 1] > cfg.f_platoon[best_vehicle - 1])
        best_vehicle = i;
    }
    const int free_rus = s.occ.fleet - s.occ.used_rus();
    if (best_vehicle > 0) {
      actions.push_back(Action::platoon(best_vehicle));
    } else if (free_rus >= 1) {
      actions.push_back(Action::vfc(std::min(cfg.n_r, free_rus)));
    } else {
      actions.push_back(Action::discard());
    }
  }
  return StationaryPolicy::deterministic(actions);
}

StationaryPolicy equal_probability_policy(const SystemConfig& cfg, const StateIndex& index) {
  StationaryPolicy pi;
  pi.choices.reserve(index.size());
  for (const SystemState& s : index.states()) {
    const std::vector<Action> feasible = feasible_actions(cfg, s);
    std::vector<ActionProbability> dist;
    dist.reserve(feasible.size());
    for (const Action& a : feasible)
      dist.push_back({a, 1.0 / static_cast<double>(feasible.size())});
    pi.choices.push_back(std::move(dist));
  }
  return pi;
}

void write_policy_dump(std::ostream& out, const StateIndex& index,
                       const std::vector<Action>& policy) {
  if (policy.size() != index.size())
    throw ContractViolation("write_policy_dump: policy size does not match index");
  std::ostringstream os;
  os << "# state\taction\n";
  for (std::size_t s = 0; s < index.size(); ++s)
    os << to_string(index.state(s)) << '\t' << to_string(policy[s]) << '\n';
  out << os.str();
}

std::vector<Action> read_policy_dump(std::istream& in, const SystemConfig& cfg,
                                     const StateIndex& index) {
  std::vector<Action> policy(index.size());
  std::vector<bool> seen(index.size(), false);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ContractViolation("policy dump line " + std::to_string(line_no) +
                              ": expected state<TAB>action");
    const SystemState s = parse_state(std::string_view(line).substr(0, tab));
    const Action a = parse_action(std::string_view(line).substr(tab + 1));
    const std::size_t i = index.index_of(s);
    if (seen[i])
      throw ContractViolation("policy dump line " + std::to_string(line_no) +
                              ": duplicate state");
    if (!is_feasible_action(cfg, s, a))
      throw ContractViolation("policy dump line " + std::to_string(line_no) +
                              ": infeasible action " + to_string(a));
    policy[i] = a;
    seen[i] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw ContractViolation("policy dump does not cover every state");
  return policy;
}

}  // namespace vfc
