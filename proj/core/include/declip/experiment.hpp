#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "declip/graph.hpp"
#include "declip/noise.hpp"
#include "declip/optimizer.hpp"
#include "declip/problem.hpp"
#include "declip/schedule.hpp"

namespace declip {

// sum_i ||x_i - theta*||
double distance_to_optimum(const std::vector<Eigen::VectorXd>& states,
                           const Eigen::VectorXd& theta_star);

// sum_i ||x_i - mean_j x_j||
double consensus_error(const std::vector<Eigen::VectorXd>& states);

// ---- declarative experiment description ------------------------------------

struct ProblemSpec {
  enum class Preset { PaperV, Inline };
  Preset preset = Preset::PaperV;
  double mu_ridge = 1.0;
  ConstraintSet::Kind omega_kind = ConstraintSet::Kind::Box;
  double box_lower = -1.0;
  double box_upper = 1.0;
  double ball_radius = 1.0;
  // Inline logistic-ridge data; ignored for the preset.
  std::vector<int> labels;
  std::vector<Eigen::VectorXd> features;
};

struct GraphSpec {
  enum class Preset { Paper, EdgeList };
  Preset preset = Preset::Paper;
  int n = 0;
  std::vector<Edge> edges;
};

struct NoiseSpec {
  NoiseModel::Kind kind = NoiseModel::Kind::ShiftedPareto;
  double gamma = 2.0;
  double w_min = 1.0;
  double sigma = 1.0;
};

// Sweep axis: one aggregate curve per value of the named parameter.
// Supported parameters: "tail_index", "mu_ridge", "clipping".
struct SweepSpec {
  std::string parameter;        // empty = no sweep
  std::vector<double> values;   // for clipping: nonzero = on
};

struct ExperimentConfig {
  ProblemSpec problem;
  GraphSpec graph;
  NoiseSpec noise;
  SchedulePair schedules;

  long iterations = 10'000;
  int stride = 10;
  std::uint64_t master_seed = 1;
  int num_seeds = 20;
  std::vector<std::uint64_t> seeds;  // explicit seed list; overrides master/num
  std::vector<bool> clipping_modes{true};

  bool override_schedule_check = false;
  bool exclude_divergent = false;  // drop diverged runs from quantiles
  double oracle_tol = 1e-10;

  std::string output_dir = "out";
  std::vector<std::string> formats{"csv", "json"};

  SweepSpec sweep;
};

// Seeds actually used: the explicit list, or master_seed + index.
std::vector<std::uint64_t> resolve_seeds(const ExperimentConfig& config);

ProblemInstance build_problem(const ProblemSpec& spec);
AdjacencyMatrix build_graph_spec(const GraphSpec& spec, int expected_n);
NoiseModel build_noise(const NoiseSpec& spec, int dim);

// ---- results ----------------------------------------------------------------

struct RunKey {
  std::string sweep_id;
  bool clipping = true;
  std::uint64_t seed = 0;
};

struct RunRecord {
  RunKey key;
  RunTrace trace;
};

// Per-iteration median and interquartile range across seeds. Diverged runs
// contribute +inf past their truncation point unless excluded.
struct AggregateCurve {
  std::string sweep_id;
  bool clipping = true;
  std::vector<long> ks;

  struct Stat {
    std::vector<double> median, q25, q75;
  };
  Stat dist, consensus, gap;

  int n_runs = 0;
  int n_diverged = 0;
  double final_median_dist = 0.0;
  double auc_median_dist = 0.0;  // trapezoid over k of the median distance
};

struct ExperimentResult {
  std::vector<AggregateCurve> curves;
  std::vector<RunRecord> runs;
  std::map<std::string, OracleResult> oracles;  // by sweep id
  std::uint64_t master_seed = 0;
  int total_diverged = 0;
};

// Executes every (sweep point x clipping mode x seed) run, aggregates, and
// returns everything needed for persistence. Deterministic for a given
// config, independent of the job count.
ExperimentResult run_experiment(const ExperimentConfig& config, int jobs = 1);

}  // namespace declip
