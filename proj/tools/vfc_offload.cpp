// Batch front-end: solve, simulate and sweep the offloading model, emit CSV.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vfc/config.hpp"
#include "vfc/error.hpp"
#include "vfc/experiment.hpp"
#include "vfc/smdp.hpp"
#include "vfc/solver.hpp"

namespace {

std::vector<vfc::Strategy> parse_strategies(const std::string& text) {
  std::vector<vfc::Strategy> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(vfc::parse_strategy(item));
  if (out.empty()) throw vfc::ConfigError("--strategy is empty");
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw vfc::IoError("cannot open '" + path + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw vfc::IoError("failed writing '" + path + "'");
}

int run(int argc, char** argv) {
  CLI::App app{"SMDP task offloading for a VFC-assisted platoon"};
  std::string config_path, mode_text = "solve", strategy_text = "smdp", sweep_text;
  std::string out_path, policy_out, model_out;
  int replications = 100;
  std::int64_t horizon_events = 1'000'000;
  double horizon_time = 0.0, warmup = 0.0;
  std::uint64_t seed = 1;
  bool timing = false;

  app.add_option("--config", config_path, "config file (key = value); defaults to the reference scenario");
  app.add_option("--mode", mode_text, "solve | simulate | sweep-k | sweep-lambda | sweep-d");
  app.add_option("--strategy", strategy_text, "smdp | greedy | equal, or a comma list");
  app.add_option("--sweep", sweep_text, "a:b:step or comma list");
  app.add_option("--replications", replications, "simulation replications");
  app.add_option("--horizon-events", horizon_events, "event cap per replication");
  app.add_option("--horizon-time", horizon_time, "simulated seconds per replication (default 50/alpha)");
  app.add_option("--warmup", warmup, "seconds excluded from case/delay statistics");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--out", out_path, "CSV output path (default stdout)");
  app.add_option("--policy-out", policy_out, "policy dump path (solve mode)");
  app.add_option("--model-out", model_out, "uniformized model dump path (solve mode)");
  app.add_flag("--timing", timing, "fill the wall_time_s column (output is then not reproducible)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error[usage]: " << e.what() << "\n";
    return 2;
  }

  const vfc::SystemConfig cfg =
      config_path.empty() ? vfc::SystemConfig{} : vfc::load_config(config_path);
  cfg.validate();

  vfc::ExperimentSpec spec;
  spec.mode = vfc::parse_mode(mode_text);
  spec.strategies = parse_strategies(strategy_text);
  if (!sweep_text.empty()) spec.sweep = vfc::parse_sweep(sweep_text);
  spec.sim.replications = replications;
  spec.sim.max_events = horizon_events;
  spec.sim.horizon = horizon_time > 0 ? horizon_time : 50.0 / cfg.alpha;
  spec.sim.warmup = warmup;
  spec.sim.seed = seed;
  spec.record_wall_time = timing;

  if ((!policy_out.empty() || !model_out.empty()) && spec.mode != vfc::Mode::solve)
    throw vfc::ConfigError("--policy-out and --model-out require --mode solve");
  bool wants_smdp = false;
  for (auto s : spec.strategies) wants_smdp |= s == vfc::Strategy::smdp;
  if (!policy_out.empty() && !wants_smdp)
    throw vfc::ConfigError("--policy-out requires the smdp strategy");

  vfc::ExperimentArtifacts artifacts;
  const auto rows = vfc::run_experiment(spec, cfg, &artifacts);

  if (out_path.empty()) {
    vfc::write_csv(std::cout, rows);
  } else {
    vfc::write_csv(rows, out_path);
  }

  if (!policy_out.empty()) {
    auto out = open_out(policy_out);
    vfc::write_policy_dump(out, artifacts.scenario->index, *artifacts.smdp_policy);
    finish(out, policy_out);
  }
  if (!model_out.empty()) {
    auto out = open_out(model_out);
    vfc::write_model_dump(out, *artifacts.scenario, vfc::build_model(*artifacts.scenario));
    finish(out, model_out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const vfc::Error& e) {
    std::cerr << "error[" << vfc::to_string(e.category()) << "]: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << "\n";
  }
  return 1;
}
