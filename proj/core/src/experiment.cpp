#include "vfc/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "vfc/error.hpp"
#include "vfc/solver.hpp"

namespace vfc {
namespace {

double parse_number(std::string_view text) {
  std::string s(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("bad sweep value '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw ConfigError("bad sweep value '" + s + "'");
  return v;
}

std::string format_number(double v) {
  if (!std::isfinite(v)) return {};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

const char* sweep_param(Mode m) {
  switch (m) {
    case Mode::sweep_k: return "k_max";
    case Mode::sweep_lambda: return "lambda_p";
    case Mode::sweep_d: return "d";
    default: return "";
  }
}

}  // namespace

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::solve: return "solve";
    case Mode::simulate: return "simulate";
    case Mode::sweep_k: return "sweep-k";
    case Mode::sweep_lambda: return "sweep-lambda";
    case Mode::sweep_d: return "sweep-d";
  }
  return "?";
}

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::smdp: return "smdp";
    case Strategy::greedy: return "greedy";
    case Strategy::equal: return "equal";
  }
  return "?";
}

Mode parse_mode(std::string_view t) {
  for (Mode m : {Mode::solve, Mode::simulate, Mode::sweep_k, Mode::sweep_lambda, Mode::sweep_d})
    if (t == to_string(m)) return m;
  throw ConfigError("unknown mode '" + std::string(t) + "'");
}

Strategy parse_strategy(std::string_view t) {
  for (Strategy s : {Strategy::smdp, Strategy::greedy, Strategy::equal})
    if (t == to_string(s)) return s;
  throw ConfigError("unknown strategy '" + std::string(t) + "'");
}

std::vector<double> parse_sweep(std::string_view text) {
  std::vector<double> values;
  if (text.find(':') != std::string_view::npos) {
    std::vector<double> parts;
    while (true) {
      const auto colon = text.find(':');
      parts.push_back(parse_number(text.substr(0, colon)));
      if (colon == std::string_view::npos) break;
      text.remove_prefix(colon + 1);
    }
    if (parts.size() != 3) throw ConfigError("sweep range must be a:b:step");
    const double a = parts[0], b = parts[1], step = parts[2];
    if (!(step > 0)) throw ConfigError("sweep step must be > 0");
    if (b < a) throw ConfigError("sweep range must be increasing");
    const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9)) + 1;
    for (long i = 0; i < count; ++i) values.push_back(a + static_cast<double>(i) * step);
  } else {
    while (true) {
      const auto comma = text.find(',');
      values.push_back(parse_number(text.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      text.remove_prefix(comma + 1);
    }
  }
  if (values.empty()) throw ConfigError("sweep is empty");
  for (std::size_t i = 1; i < values.size(); ++i)
    if (!(values[i] > values[i - 1])) throw ConfigError("sweep values must be strictly increasing");
  return values;
}

std::vector<double> default_sweep(Mode m) {
  switch (m) {
    case Mode::sweep_k: return parse_sweep("4:10:1");
    case Mode::sweep_lambda: return parse_sweep("13:20:1");
    case Mode::sweep_d: return parse_sweep("20:50:10");
    default: return {};
  }
}

void ExperimentSpec::validate() const {
  if (strategies.empty()) throw ConfigError("at least one strategy is required");
  const bool sweeping =
      mode == Mode::sweep_k || mode == Mode::sweep_lambda || mode == Mode::sweep_d;
  if (!sweeping && !sweep.empty()) throw ConfigError("--sweep requires a sweep mode");
  for (std::size_t i = 1; i < sweep.size(); ++i)
    if (!(sweep[i] > sweep[i - 1])) throw ConfigError("sweep values must be strictly increasing");
  if (mode == Mode::sweep_k)
    for (double v : sweep)
      if (v != std::floor(v)) throw ConfigError("k_max sweep values must be integers");
  if (mode != Mode::solve) sim.validate();
}

std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec, const SystemConfig& cfg,
                                          ExperimentArtifacts* artifacts) {
  spec.validate();
  cfg.validate();
  using Clock = std::chrono::steady_clock;

  std::vector<double> points = spec.sweep.empty() ? default_sweep(spec.mode) : spec.sweep;
  const bool sweeping = !points.empty();
  if (!sweeping) points.push_back(0.0);

  std::vector<ExperimentRow> rows;
  for (double point : points) {
    SystemConfig local = cfg;
    switch (spec.mode) {
      case Mode::sweep_k: local.k_max = static_cast<int>(point); break;
      case Mode::sweep_lambda: local.lambda_p = point; break;
      case Mode::sweep_d: local.d = point; break;
      default: break;
    }

    const auto build_start = Clock::now();
    Scenario sc = Scenario::build(local);
    const UniformizedModel model = uniformize(sc.cfg, build_model(sc));
    const double build_seconds =
        std::chrono::duration<double>(Clock::now() - build_start).count();
    const std::size_t ref = sc.index.index_of(sc.reference_state());

    for (Strategy strategy : spec.strategies) {
      const auto start = Clock::now();
      ExperimentRow row;
      row.sweep_param = sweeping ? sweep_param(spec.mode) : "";
      row.sweep_value = sweeping ? point : std::nan("");
      row.strategy = strategy;
      row.k_max = local.k_max;
      row.lambda_p = local.lambda_p;
      row.d = local.d;
      row.states = sc.index.size();

      StationaryPolicy pi;
      switch (strategy) {
        case Strategy::smdp: {
          const SolveResult solved = value_iteration(model, local.epsilon);
          row.solver_iterations = solved.iterations;
          row.solver_residual = solved.final_residual;
          pi = StationaryPolicy::deterministic(solved.policy);
          if (artifacts && !sweeping) artifacts->smdp_policy = solved.policy;
          break;
        }
        case Strategy::greedy: pi = greedy_policy(sc.cfg, sc.index); break;
        case Strategy::equal: pi = equal_probability_policy(sc.cfg, sc.index); break;
      }

      const std::vector<double> values = evaluate_policy(model, pi);
      const std::vector<double> weights = occupancy_distribution(model, pi);
      row.value_reference = values[ref];
      double mean = 0.0;
      for (std::size_t s = 0; s < values.size(); ++s) mean += weights[s] * values[s];
      row.value_mean = mean;

      if (spec.mode != Mode::solve) row.sim = simulate(sc, pi, spec.sim);
      if (spec.record_wall_time)
        row.wall_time =
            build_seconds + std::chrono::duration<double>(Clock::now() - start).count();
      rows.push_back(std::move(row));
    }
    if (artifacts && !sweeping) artifacts->scenario = std::move(sc);
  }
  return rows;
}

std::vector<std::string> csv_columns(int n_r) {
  const int classes = std::max(3, n_r);
  std::vector<std::string> cols = {"sweep_param", "sweep_value", "strategy", "k_max",
                                   "lambda_p",    "d",           "states",   "p_case0",
                                   "p_case1",     "p_case2"};
  for (int j = 1; j <= classes; ++j) cols.push_back("p_a" + std::to_string(j));
  for (const char* c : {"mean_offload_delay", "reward_exact_ref", "reward_exact_mean",
                        "reward_sim", "ci_p_case0", "ci_p_case1", "ci_p_case2"})
    cols.emplace_back(c);
  for (int j = 1; j <= classes; ++j) cols.push_back("ci_p_a" + std::to_string(j));
  for (const char* c : {"ci_mean_offload_delay", "ci_reward_sim", "arrivals_observed",
                        "solver_iterations", "solver_residual", "wall_time_s"})
    cols.emplace_back(c);
  return cols;
}

void write_csv(std::ostream& out, const std::vector<ExperimentRow>& rows) {
  int n_r = 3;
  for (const ExperimentRow& r : rows)
    if (r.sim) n_r = std::max(n_r, static_cast<int>(r.sim->p_alloc.size()));
  const int classes = std::max(3, n_r);

  std::ostringstream os;
  const auto cols = csv_columns(n_r);
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';

  const double nan = std::nan("");
  for (const ExperimentRow& r : rows) {
    std::vector<std::string> f;
    f.push_back(r.sweep_param);
    f.push_back(format_number(r.sweep_value));
    f.emplace_back(to_string(r.strategy));
    f.push_back(std::to_string(r.k_max));
    f.push_back(format_number(r.lambda_p));
    f.push_back(format_number(r.d));
    f.push_back(std::to_string(r.states));
    const SimStats* s = r.sim ? &*r.sim : nullptr;
    auto alloc = [&](const std::vector<double>& v, int j) {
      return s && j < static_cast<int>(v.size()) ? v[j] : nan;
    };
    f.push_back(format_number(s ? s->p_case0 : nan));
    f.push_back(format_number(s ? s->p_case1 : nan));
    f.push_back(format_number(s ? s->p_case2 : nan));
    for (int j = 0; j < classes; ++j) f.push_back(format_number(s ? alloc(s->p_alloc, j) : nan));
    f.push_back(format_number(s ? s->mean_offload_delay : nan));
    f.push_back(format_number(r.value_reference));
    f.push_back(format_number(r.value_mean));
    f.push_back(format_number(s ? s->discounted_reward : nan));
    f.push_back(format_number(s ? s->ci.p_case0 : nan));
    f.push_back(format_number(s ? s->ci.p_case1 : nan));
    f.push_back(format_number(s ? s->ci.p_case2 : nan));
    for (int j = 0; j < classes; ++j)
      f.push_back(format_number(s ? alloc(s->ci.p_alloc, j) : nan));
    f.push_back(format_number(s ? s->ci.mean_offload_delay : nan));
    f.push_back(format_number(s ? s->ci.discounted_reward : nan));
    f.push_back(s ? std::to_string(s->arrivals_observed) : std::string{});
    f.push_back(std::to_string(r.solver_iterations));
    f.push_back(format_number(r.solver_residual));
    f.push_back(r.wall_time ? format_number(*r.wall_time) : std::string{});
    for (std::size_t i = 0; i < f.size(); ++i) os << (i ? "," : "") << f[i];
    os << '\n';
  }
  out << os.str();
}

void write_csv(const std::vector<ExperimentRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_csv(out, rows);
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace vfc
