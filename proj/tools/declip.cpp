// Command-line front end: config validation, centralized oracle, experiment
// execution and sweeps. Exit codes: 0 success, 1 validation failure,
// 2 parse error, 3 divergence-only failures.

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "declip/config.hpp"
#include "declip/errors.hpp"
#include "declip/experiment.hpp"
#include "declip/graph.hpp"
#include "declip/io.hpp"
#include "declip/noise.hpp"
#include "declip/problem.hpp"
#include "declip/schedule.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitParseError = 2;
constexpr int kExitDivergence = 3;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  long seed = -1;
  int jobs = 1;
  bool override_schedule_check = false;
};

std::string default_out_dir() {
  const char* env = std::getenv("DECLIP_OUT_DIR");
  return env != nullptr ? env : "";
}

declip::ExperimentConfig load(const CommonArgs& args) {
  declip::ExperimentConfig config = declip::load_config(args.config_path);
  if (args.seed >= 0) config.master_seed = static_cast<std::uint64_t>(args.seed);
  if (args.override_schedule_check) config.override_schedule_check = true;
  if (!args.out_dir.empty()) {
    config.output_dir = args.out_dir;
  } else if (const std::string env_dir = default_out_dir(); !env_dir.empty()) {
    config.output_dir = env_dir;
  }
  return config;
}

void add_common(CLI::App* cmd, CommonArgs& args, bool with_jobs = true) {
  cmd->add_option("--config", args.config_path, "experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out_dir, "output directory (overrides config and DECLIP_OUT_DIR)");
  cmd->add_option("--seed", args.seed, "master seed override");
  if (with_jobs) cmd->add_option("--jobs", args.jobs, "max concurrent runs")->check(CLI::PositiveNumber);
  cmd->add_flag("--override-schedule-check", args.override_schedule_check,
                "run even if the schedule conditions fail");
}

// ---- validate --------------------------------------------------------------

int cmd_validate(const CommonArgs& args, bool directed_edge_count) {
  const declip::ExperimentConfig config = load(args);
  bool all_pass = true;
  auto line = [&](const std::string& name, bool pass, const std::string& detail) {
    std::cout << (pass ? "[pass] " : "[FAIL] ") << name << ": " << detail << '\n';
    all_pass &= pass;
  };

  const declip::ProblemInstance instance = declip::build_problem(config.problem);
  const declip::AdjacencyMatrix graph =
      declip::build_graph_spec(config.graph, instance.n_agents());

  const auto graph_report = declip::validate_doubly_stochastic(graph);
  line("graph.doubly_stochastic_connected", graph_report.pass(), graph_report.summary());

  if (graph.n() >= 2 && graph.edge_count_q() >= 1) {
    declip::AdjacencyMatrix for_bound = graph;
    int q = graph.edge_count_q();
    if (directed_edge_count) q *= 2;
    std::ostringstream detail;
    if (directed_edge_count) {
      // Rebuild with doubled Q by evaluating the formula directly.
      const double n = graph.n();
      const double base = 1.0 - graph.eta() / (4.0 * n * n);
      detail << "theta=" << std::pow(base, -2.0) << " beta=" << std::pow(base, 1.0 / q)
             << " (eta=" << graph.eta() << ", Q=" << q << ", directed count)";
    } else {
      const auto bound = declip::consensus_contraction_bound(for_bound);
      detail << "theta=" << bound.theta << " beta=" << bound.beta
             << " (eta=" << graph.eta() << ", Q=" << q << ")";
    }
    line("graph.contraction_bound", true, detail.str());
  }

  const double c0 = declip::gradient_bound(instance);
  {
    std::ostringstream detail;
    detail << "C0=" << c0 << " over Omega (certified)";
    line("problem.gradient_bound", true, detail.str());
  }

  const auto schedule_report = declip::validate_schedules(config.schedules, c0);
  for (const auto& cond : schedule_report.conditions) {
    line("schedules." + cond.name, cond.pass, cond.detail);
  }

  // Noise spot checks: centered mean and finite delta-moment at the
  // schedule's delta.
  const declip::NoiseModel noise = declip::build_noise(config.noise, instance.dim());
  if (noise.kind == declip::NoiseModel::Kind::ShiftedPareto &&
      config.schedules.delta >= noise.gamma) {
    std::ostringstream detail;
    detail << "delta=" << config.schedules.delta << " >= gamma=" << noise.gamma
           << ": E||xi||^delta diverges";
    line("noise.delta_moment", false, detail.str());
  } else {
    declip::Rng rng(config.master_seed);
    const double moment =
        declip::estimate_delta_moment(noise, config.schedules.delta, 200'000, rng);
    std::ostringstream detail;
    detail << "estimated E||xi||^delta = " << moment << " at delta=" << config.schedules.delta;
    line("noise.delta_moment", true, detail.str());

    declip::Rng rng2(config.master_seed + 1);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(instance.dim());
    const int n_mean = 200'000;
    for (int s = 0; s < n_mean; ++s) mean += declip::sample_noise(noise, rng2);
    mean /= static_cast<double>(n_mean);
    const double mean_norm = mean.norm() / std::sqrt(static_cast<double>(instance.dim()));
    std::ostringstream mean_detail;
    mean_detail << "per-coordinate sample mean magnitude " << mean_norm << " (200k draws)";
    line("noise.zero_mean", mean_norm < 0.05, mean_detail.str());
  }

  const bool ok = all_pass || config.override_schedule_check;
  std::cout << (all_pass ? "validation passed" : ok ? "validation failed (override set)" : "validation failed")
            << '\n';
  return ok ? kExitOk : kExitValidationFailure;
}

// ---- oracle ----------------------------------------------------------------

int cmd_oracle(const CommonArgs& args) {
  const declip::ExperimentConfig config = load(args);
  const declip::ProblemInstance instance = declip::build_problem(config.problem);
  const declip::OracleResult oracle = declip::solve_centralized(instance, config.oracle_tol);

  namespace fs = std::filesystem;
  fs::create_directories(config.output_dir);
  const std::string path = (fs::path(config.output_dir) / "oracle.json").string();
  declip::write_oracle_artifact(path, oracle, declip::config_hash(config));
  std::cout << "theta* written to " << path << " (residual " << oracle.residual
            << " after " << oracle.iterations << " iterations)\n";
  return kExitOk;
}

// ---- run / sweep -----------------------------------------------------------

int execute(const declip::ExperimentConfig& config, int jobs) {
  const declip::ExperimentResult result = declip::run_experiment(config, jobs);
  const declip::PersistedExperiment persisted = declip::persist_experiment(config, result);

  for (const auto& curve : result.curves) {
    std::cout << curve.sweep_id << " clipping=" << (curve.clipping ? "on" : "off")
              << " final_median_dist=" << declip::format_double(curve.final_median_dist)
              << " auc=" << declip::format_double(curve.auc_median_dist)
              << " diverged=" << curve.n_diverged << "/" << curve.n_runs << '\n';
  }
  if (!persisted.manifest_file.empty()) {
    std::cout << "manifest: " << persisted.manifest_file << '\n';
  }
  return result.total_diverged > 0 ? kExitDivergence : kExitOk;
}

int cmd_run(const CommonArgs& args) {
  return execute(load(args), args.jobs);
}

int cmd_sweep(const CommonArgs& args, const std::string& param, const std::string& values) {
  declip::ExperimentConfig config = load(args);
  config.sweep.parameter = param;
  config.sweep.values.clear();
  std::istringstream list(values);
  std::string item;
  while (std::getline(list, item, ',')) {
    if (item == "on" || item == "true") {
      config.sweep.values.push_back(1.0);
    } else if (item == "off" || item == "false") {
      config.sweep.values.push_back(0.0);
    } else {
      try {
        config.sweep.values.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw declip::ParseError("--values", "cannot parse '" + item + "' as a number");
      }
    }
  }
  if (config.sweep.values.empty()) {
    throw declip::ParseError("--values", "expected a comma-separated list");
  }
  return execute(config, args.jobs);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clipped distributed stochastic subgradient projection simulator"};
  app.require_subcommand(1);

  CommonArgs validate_args, oracle_args, run_args, sweep_args;
  bool directed_edge_count = false;
  std::string sweep_param, sweep_values;

  CLI::App* validate = app.add_subcommand("validate", "check graph, problem, noise and schedule conditions");
  add_common(validate, validate_args, false);
  validate->add_flag("--directed-edge-count", directed_edge_count,
                     "count each link twice (directed) in the contraction bound's Q");

  CLI::App* oracle = app.add_subcommand("oracle", "solve for theta* and write the oracle artifact");
  add_common(oracle, oracle_args, false);

  CLI::App* runc = app.add_subcommand("run", "execute the configured experiment");
  add_common(runc, run_args);

  CLI::App* sweep = app.add_subcommand("sweep", "run once per value of a swept parameter");
  add_common(sweep, sweep_args);
  sweep->add_option("--param", sweep_param, "tail_index | mu_ridge | clipping")->required();
  sweep->add_option("--values", sweep_values, "comma-separated values")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitParseError;
  }

  try {
    if (validate->parsed()) return cmd_validate(validate_args, directed_edge_count);
    if (oracle->parsed()) return cmd_oracle(oracle_args);
    if (runc->parsed()) return cmd_run(run_args);
    if (sweep->parsed()) return cmd_sweep(sweep_args, sweep_param, sweep_values);
  } catch (const declip::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitParseError;
  } catch (const declip::UnknownParameter& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParseError;
  } catch (const declip::ScheduleInvalid& e) {
    std::cerr << "schedule validation failed: " << e.what() << '\n';
    return kExitValidationFailure;
  } catch (const declip::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidationFailure;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << '\n';
    return kExitValidationFailure;
  }
  return kExitOk;
}
