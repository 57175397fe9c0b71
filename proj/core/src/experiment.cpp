#include "declip/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include "declip/errors.hpp"

namespace declip {

double distance_to_optimum(const std::vector<Eigen::VectorXd>& states,
                           const Eigen::VectorXd& theta_star) {
  if (states.empty()) throw Error("need at least one state");
  double total = 0.0;
  for (const auto& x : states) {
    if (x.size() != theta_star.size()) {
      throw DimensionMismatch("state/reference dimensions differ");
    }
    total += (x - theta_star).norm();
  }
  return total;
}

double consensus_error(const std::vector<Eigen::VectorXd>& states) {
  if (states.empty()) throw Error("need at least one state");
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(states.front().size());
  for (const auto& x : states) mean += x;
  mean /= static_cast<double>(states.size());
  double total = 0.0;
  for (const auto& x : states) total += (x - mean).norm();
  return total;
}

std::vector<std::uint64_t> resolve_seeds(const ExperimentConfig& config) {
  if (!config.seeds.empty()) return config.seeds;
  if (config.num_seeds < 1) throw Error("experiment needs at least one seed");
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(config.num_seeds));
  for (int i = 0; i < config.num_seeds; ++i) {
    seeds[static_cast<std::size_t>(i)] = run_seed(config.master_seed, static_cast<std::uint64_t>(i));
  }
  return seeds;
}

ProblemInstance build_problem(const ProblemSpec& spec) {
  if (spec.preset == ProblemSpec::Preset::PaperV) {
    PaperInstanceOptions options;
    options.mu_ridge = spec.mu_ridge;
    options.omega_kind = spec.omega_kind;
    return build_paper_instance(options).first;
  }
  LogisticRidgeData data;
  data.labels = spec.labels;
  data.features = spec.features;
  data.mu_ridge = spec.mu_ridge;
  const int dim = data.dim();
  ConstraintSet omega = spec.omega_kind == ConstraintSet::Kind::Box
                            ? ConstraintSet::box(dim, spec.box_lower, spec.box_upper)
                            : ConstraintSet::ball(Eigen::VectorXd::Zero(dim), spec.ball_radius);
  return ProblemInstance::logistic_ridge(std::move(data), std::move(omega));
}

AdjacencyMatrix build_graph_spec(const GraphSpec& spec, int expected_n) {
  AdjacencyMatrix graph = spec.preset == GraphSpec::Preset::Paper
                              ? build_paper_instance().second
                              : build_graph(spec.n, spec.edges);
  if (expected_n > 0 && graph.n() != expected_n) {
    std::ostringstream msg;
    msg << "graph has " << graph.n() << " agents but the problem has " << expected_n;
    throw DimensionMismatch(msg.str());
  }
  return graph;
}

NoiseModel build_noise(const NoiseSpec& spec, int dim) {
  switch (spec.kind) {
    case NoiseModel::Kind::ShiftedPareto:
      return NoiseModel::shifted_pareto(dim, spec.gamma, spec.w_min);
    case NoiseModel::Kind::Gaussian:
      return NoiseModel::gaussian(dim, spec.sigma);
    case NoiseModel::Kind::Zero:
      return NoiseModel::zero(dim);
  }
  throw Error("unknown noise kind");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One sweep point after applying the swept parameter.
struct SweepPoint {
  std::string id;
  ProblemSpec problem;
  NoiseSpec noise;
  std::vector<bool> clipping_modes;
};

std::string format_value(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

std::vector<SweepPoint> expand_sweep(const ExperimentConfig& config) {
  std::vector<SweepPoint> points;
  const auto& sweep = config.sweep;
  if (sweep.parameter.empty()) {
    points.push_back({"base", config.problem, config.noise, config.clipping_modes});
    return points;
  }
  if (sweep.values.empty()) throw Error("sweep values must be non-empty");

  for (double value : sweep.values) {
    SweepPoint point{"", config.problem, config.noise, config.clipping_modes};
    if (sweep.parameter == "tail_index") {
      point.noise.gamma = value;
      point.id = "gamma=" + format_value(value);
    } else if (sweep.parameter == "mu_ridge") {
      point.problem.mu_ridge = value;
      point.id = "mu=" + format_value(value);
    } else if (sweep.parameter == "clipping") {
      const bool on = value != 0.0;
      point.clipping_modes = {on};
      point.id = on ? "clip=on" : "clip=off";
    } else {
      throw UnknownParameter("unknown sweep parameter: " + sweep.parameter);
    }
    points.push_back(std::move(point));
  }
  return points;
}

// Type-7 quantile with +inf guards (inf - inf would poison interpolation).
double quantile(std::vector<double> values, double p) {
  if (values.empty()) return kInf;
  std::sort(values.begin(), values.end());
  const double h = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = static_cast<std::size_t>(std::ceil(h));
  if (std::isinf(values[lo]) || std::isinf(values[hi])) {
    return values[lo];  // sorted, so lo is the smaller one
  }
  const double w = h - std::floor(h);
  return values[lo] + w * (values[hi] - values[lo]);
}

struct MetricColumns {
  std::vector<std::vector<double>> dist, consensus, gap;  // [record][run]
};

void fill_quantiles(const std::vector<std::vector<double>>& samples,
                    AggregateCurve::Stat& stat) {
  stat.median.reserve(samples.size());
  stat.q25.reserve(samples.size());
  stat.q75.reserve(samples.size());
  for (const auto& row : samples) {
    stat.median.push_back(quantile(row, 0.5));
    stat.q25.push_back(quantile(row, 0.25));
    stat.q75.push_back(quantile(row, 0.75));
  }
}

double trapezoid_auc(const std::vector<long>& ks, const std::vector<double>& ys) {
  double auc = 0.0;
  for (std::size_t r = 1; r < ks.size(); ++r) {
    auc += 0.5 * (ys[r] + ys[r - 1]) * static_cast<double>(ks[r] - ks[r - 1]);
  }
  return auc;
}

void run_jobs(std::size_t count, int jobs, const std::function<void(std::size_t)>& work) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t idx = 0; idx < count; ++idx) work(idx);
    return;
  }
  std::atomic<std::size_t> cursor{0};
  const int workers = std::min<int>(jobs, static_cast<int>(count));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&]() {
      for (std::size_t idx = cursor.fetch_add(1); idx < count; idx = cursor.fetch_add(1)) {
        work(idx);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, int jobs) {
  const std::vector<std::uint64_t> seeds = resolve_seeds(config);
  const std::vector<SweepPoint> points = expand_sweep(config);

  ExperimentResult result;
  result.master_seed = config.master_seed;

  // Per-point problem/graph/oracle setup; also gates on the schedule
  // conditions using each point's certified gradient bound.
  struct PointContext {
    ProblemInstance instance;
    AdjacencyMatrix graph;
    NoiseModel noise;
    ReferenceSolution reference;
  };
  std::vector<PointContext> contexts;
  contexts.reserve(points.size());
  for (const auto& point : points) {
    ProblemInstance instance = build_problem(point.problem);
    AdjacencyMatrix graph = build_graph_spec(config.graph, instance.n_agents());
    NoiseModel noise = build_noise(point.noise, instance.dim());

    const ScheduleReport report =
        validate_schedules(config.schedules, gradient_bound(instance));
    if (!report.all_pass && !config.override_schedule_check) {
      throw ScheduleInvalid("schedule conditions fail for sweep point '" + point.id +
                            "' (set the override flag to run anyway):\n" +
                            report.summary());
    }

    OracleResult oracle = solve_centralized(instance, config.oracle_tol);
    result.oracles.emplace(point.id, oracle);
    contexts.push_back({std::move(instance), std::move(graph), std::move(noise),
                        {oracle.theta_star, oracle.f_star}});
  }

  // Flatten (point, mode, seed) into an index-stable job list.
  struct Job {
    std::size_t point;
    bool clipping;
    std::uint64_t seed;
  };
  std::vector<Job> job_list;
  for (std::size_t p = 0; p < points.size(); ++p) {
    for (bool mode : points[p].clipping_modes) {
      for (std::uint64_t seed : seeds) job_list.push_back({p, mode, seed});
    }
  }

  result.runs.resize(job_list.size());
  run_jobs(job_list.size(), jobs, [&](std::size_t idx) {
    const Job& job = job_list[idx];
    const PointContext& ctx = contexts[job.point];
    RunOptions options;
    options.iterations = config.iterations;
    options.stride = config.stride;
    options.seed = job.seed;
    options.clipping = job.clipping;
    RunTrace trace = run(ctx.instance, ctx.graph, ctx.noise, config.schedules,
                         ctx.reference, options);
    result.runs[idx] = {{points[job.point].id, job.clipping, job.seed}, std::move(trace)};
  });

  for (const auto& record : result.runs) result.total_diverged += record.trace.diverged ? 1 : 0;

  // Aggregate one curve per (point, mode).
  for (std::size_t p = 0; p < points.size(); ++p) {
    for (bool mode : points[p].clipping_modes) {
      AggregateCurve curve;
      curve.sweep_id = points[p].id;
      curve.clipping = mode;

      // Record grid from any non-diverged run (all share it); fall back to
      // the longest trace when every run diverged.
      const RunRecord* grid_source = nullptr;
      for (const auto& record : result.runs) {
        if (record.key.sweep_id != points[p].id || record.key.clipping != mode) continue;
        if (!record.trace.diverged) {
          grid_source = &record;
          break;
        }
        if (!grid_source ||
            record.trace.records.size() > grid_source->trace.records.size()) {
          grid_source = &record;
        }
      }
      if (grid_source == nullptr) continue;
      for (const auto& rec : grid_source->trace.records) curve.ks.push_back(rec.k);

      MetricColumns columns;
      columns.dist.resize(curve.ks.size());
      columns.consensus.resize(curve.ks.size());
      columns.gap.resize(curve.ks.size());

      for (const auto& record : result.runs) {
        if (record.key.sweep_id != points[p].id || record.key.clipping != mode) continue;
        ++curve.n_runs;
        if (record.trace.diverged) {
          ++curve.n_diverged;
          if (config.exclude_divergent) continue;
        }
        for (std::size_t r = 0; r < curve.ks.size(); ++r) {
          const bool have = r < record.trace.records.size();
          columns.dist[r].push_back(have ? record.trace.records[r].dist_to_opt : kInf);
          columns.consensus[r].push_back(have ? record.trace.records[r].consensus_err : kInf);
          columns.gap[r].push_back(have ? record.trace.records[r].subopt_gap : kInf);
        }
      }

      fill_quantiles(columns.dist, curve.dist);
      fill_quantiles(columns.consensus, curve.consensus);
      fill_quantiles(columns.gap, curve.gap);
      curve.final_median_dist = curve.dist.median.empty() ? kInf : curve.dist.median.back();
      curve.auc_median_dist = trapezoid_auc(curve.ks, curve.dist.median);
      result.curves.push_back(std::move(curve));
    }
  }

  return result;
}

}  // namespace declip
