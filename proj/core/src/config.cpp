#include "declip/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "declip/errors.hpp"

namespace declip {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ParseError(path.empty() ? "$" : path, message);
}

const json& member(const json& node, const std::string& path, const char* key) {
  auto it = node.find(key);
  if (it == node.end()) fail(path + "." + key, "missing required field");
  return *it;
}

void expect_object(const json& node, const std::string& path) {
  if (!node.is_object()) fail(path, "expected an object");
}

void reject_unknown_keys(const json& node, const std::string& path,
                         const std::set<std::string>& allowed) {
  for (const auto& item : node.items()) {
    if (!allowed.contains(item.key())) fail(path + "." + item.key(), "unknown field");
  }
}

double get_number(const json& node, const std::string& path, const char* key) {
  const json& value = member(node, path, key);
  if (!value.is_number()) fail(path + "." + key, "expected a number");
  return value.get<double>();
}

double get_number_or(const json& node, const std::string& path, const char* key,
                     double fallback) {
  if (!node.contains(key)) return fallback;
  const json& value = node.at(key);
  if (!value.is_number()) fail(path + "." + key, "expected a number");
  return value.get<double>();
}

long get_integer_or(const json& node, const std::string& path, const char* key,
                    long fallback) {
  if (!node.contains(key)) return fallback;
  const json& value = node.at(key);
  if (!value.is_number_integer()) fail(path + "." + key, "expected an integer");
  return value.get<long>();
}

bool get_bool_or(const json& node, const std::string& path, const char* key,
                 bool fallback) {
  if (!node.contains(key)) return fallback;
  const json& value = node.at(key);
  if (!value.is_boolean()) fail(path + "." + key, "expected a boolean");
  return value.get<bool>();
}

std::string get_string_or(const json& node, const std::string& path, const char* key,
                          const std::string& fallback) {
  if (!node.contains(key)) return fallback;
  const json& value = node.at(key);
  if (!value.is_string()) fail(path + "." + key, "expected a string");
  return value.get<std::string>();
}

ProblemSpec parse_problem(const json& node, const std::string& path) {
  expect_object(node, path);
  reject_unknown_keys(node, path,
                      {"preset", "mu_ridge", "omega", "labels", "features"});
  ProblemSpec spec;
  const std::string preset = get_string_or(node, path, "preset", "paper-v");
  if (preset == "paper-v") {
    spec.preset = ProblemSpec::Preset::PaperV;
  } else if (preset == "inline") {
    spec.preset = ProblemSpec::Preset::Inline;
  } else {
    fail(path + ".preset", "expected \"paper-v\" or \"inline\"");
  }
  spec.mu_ridge = get_number_or(node, path, "mu_ridge", 1.0);
  if (!(spec.mu_ridge > 0.0)) fail(path + ".mu_ridge", "must be positive");

  if (node.contains("omega")) {
    const json& omega = node.at("omega");
    const std::string omega_path = path + ".omega";
    expect_object(omega, omega_path);
    reject_unknown_keys(omega, omega_path, {"kind", "lower", "upper", "radius"});
    const std::string kind = get_string_or(omega, omega_path, "kind", "box");
    if (kind == "box") {
      spec.omega_kind = ConstraintSet::Kind::Box;
      spec.box_lower = get_number_or(omega, omega_path, "lower", -1.0);
      spec.box_upper = get_number_or(omega, omega_path, "upper", 1.0);
      if (!(spec.box_lower < spec.box_upper)) fail(omega_path, "lower must be < upper");
    } else if (kind == "ball") {
      spec.omega_kind = ConstraintSet::Kind::Ball;
      spec.ball_radius = get_number_or(omega, omega_path, "radius", 1.0);
      if (!(spec.ball_radius > 0.0)) fail(omega_path + ".radius", "must be positive");
    } else {
      fail(omega_path + ".kind", "expected \"box\" or \"ball\"");
    }
  }

  if (spec.preset == ProblemSpec::Preset::Inline) {
    const json& labels = member(node, path, "labels");
    const json& features = member(node, path, "features");
    if (!labels.is_array() || labels.empty()) fail(path + ".labels", "expected a non-empty array");
    if (!features.is_array() || features.size() != labels.size()) {
      fail(path + ".features", "expected one feature vector per label");
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (!labels[i].is_number_integer()) fail(path + ".labels", "labels must be integers");
      spec.labels.push_back(labels[i].get<int>());
      const json& row = features[i];
      if (!row.is_array() || row.empty()) fail(path + ".features", "feature rows must be arrays");
      Eigen::VectorXd q(static_cast<Eigen::Index>(row.size()));
      for (std::size_t d = 0; d < row.size(); ++d) {
        if (!row[d].is_number()) fail(path + ".features", "feature entries must be numbers");
        q[static_cast<Eigen::Index>(d)] = row[d].get<double>();
      }
      spec.features.push_back(std::move(q));
    }
  } else if (node.contains("labels") || node.contains("features")) {
    fail(path, "labels/features are only valid with preset \"inline\"");
  }
  return spec;
}

GraphSpec parse_graph(const json& node, const std::string& path) {
  expect_object(node, path);
  reject_unknown_keys(node, path, {"preset", "n", "edges"});
  GraphSpec spec;
  const std::string preset = get_string_or(node, path, "preset",
                                           node.contains("edges") ? "edge-list" : "paper");
  if (preset == "paper") {
    spec.preset = GraphSpec::Preset::Paper;
    if (node.contains("edges") || node.contains("n")) {
      fail(path, "preset \"paper\" does not take n/edges");
    }
    return spec;
  }
  if (preset != "edge-list") fail(path + ".preset", "expected \"paper\" or \"edge-list\"");
  spec.preset = GraphSpec::Preset::EdgeList;
  spec.n = static_cast<int>(get_integer_or(node, path, "n", 0));
  if (spec.n < 1) fail(path + ".n", "agent count must be >= 1");
  const json& edges = member(node, path, "edges");
  if (!edges.is_array()) fail(path + ".edges", "expected an array of [i, j, weight]");
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const json& triple = edges[e];
    std::ostringstream where;
    where << path << ".edges[" << e << "]";
    if (!triple.is_array() || triple.size() != 3 || !triple[0].is_number_integer() ||
        !triple[1].is_number_integer() || !triple[2].is_number()) {
      fail(where.str(), "expected [i, j, weight]");
    }
    spec.edges.push_back({triple[0].get<int>(), triple[1].get<int>(), triple[2].get<double>()});
  }
  return spec;
}

NoiseSpec parse_noise(const json& node, const std::string& path) {
  expect_object(node, path);
  reject_unknown_keys(node, path, {"kind", "gamma", "w_min", "sigma"});
  NoiseSpec spec;
  const std::string kind = get_string_or(node, path, "kind", "shifted_pareto");
  if (kind == "shifted_pareto") {
    spec.kind = NoiseModel::Kind::ShiftedPareto;
    spec.gamma = get_number_or(node, path, "gamma", 2.0);
    spec.w_min = get_number_or(node, path, "w_min", 1.0);
    if (!(spec.gamma > 1.0)) fail(path + ".gamma", "tail index must exceed 1");
    if (!(spec.w_min > 0.0)) fail(path + ".w_min", "scale must be positive");
  } else if (kind == "gaussian") {
    spec.kind = NoiseModel::Kind::Gaussian;
    spec.sigma = get_number_or(node, path, "sigma", 1.0);
    if (!(spec.sigma >= 0.0)) fail(path + ".sigma", "sigma must be nonnegative");
  } else if (kind == "zero") {
    spec.kind = NoiseModel::Kind::Zero;
  } else {
    fail(path + ".kind", "expected \"shifted_pareto\", \"gaussian\" or \"zero\"");
  }
  return spec;
}

SchedulePair parse_schedules(const json& node, const std::string& path) {
  expect_object(node, path);
  reject_unknown_keys(node, path,
                      {"alpha_coeff", "alpha_exp", "tau_coeff", "tau_exp", "delta"});
  SchedulePair s;
  s.alpha_coeff = get_number(node, path, "alpha_coeff");
  s.alpha_exp = get_number(node, path, "alpha_exp");
  s.tau_coeff = get_number(node, path, "tau_coeff");
  s.tau_exp = get_number(node, path, "tau_exp");
  s.delta = get_number(node, path, "delta");
  try {
    s.check_structure();
  } catch (const ScheduleInvalid& err) {
    fail(path, err.what());
  }
  return s;
}

void parse_run(const json& node, const std::string& path, ExperimentConfig& config) {
  expect_object(node, path);
  reject_unknown_keys(node, path,
                      {"iterations", "stride", "master_seed", "num_seeds", "seeds",
                       "clipping", "override_schedule_check", "exclude_divergent",
                       "oracle_tol"});
  config.iterations = get_integer_or(node, path, "iterations", config.iterations);
  if (config.iterations < 1) fail(path + ".iterations", "must be >= 1");
  config.stride = static_cast<int>(get_integer_or(node, path, "stride", config.stride));
  if (config.stride < 1) fail(path + ".stride", "must be >= 1");
  const long master = get_integer_or(node, path, "master_seed",
                                     static_cast<long>(config.master_seed));
  if (master < 0) fail(path + ".master_seed", "must be nonnegative");
  config.master_seed = static_cast<std::uint64_t>(master);
  config.num_seeds = static_cast<int>(get_integer_or(node, path, "num_seeds", config.num_seeds));
  if (config.num_seeds < 1) fail(path + ".num_seeds", "must be >= 1");

  if (node.contains("seeds")) {
    const json& seeds = node.at("seeds");
    if (!seeds.is_array() || seeds.empty()) fail(path + ".seeds", "expected a non-empty array");
    for (const auto& s : seeds) {
      if (!s.is_number_integer() || s.get<long>() < 0) {
        fail(path + ".seeds", "seeds must be nonnegative integers");
      }
      config.seeds.push_back(s.get<std::uint64_t>());
    }
  }

  if (node.contains("clipping")) {
    const json& clipping = node.at("clipping");
    config.clipping_modes.clear();
    if (clipping.is_boolean()) {
      config.clipping_modes.push_back(clipping.get<bool>());
    } else if (clipping.is_array() && !clipping.empty()) {
      for (const auto& mode : clipping) {
        if (!mode.is_boolean()) fail(path + ".clipping", "modes must be booleans");
        config.clipping_modes.push_back(mode.get<bool>());
      }
    } else {
      fail(path + ".clipping", "expected a boolean or an array of booleans");
    }
  }

  config.override_schedule_check =
      get_bool_or(node, path, "override_schedule_check", config.override_schedule_check);
  config.exclude_divergent =
      get_bool_or(node, path, "exclude_divergent", config.exclude_divergent);
  config.oracle_tol = get_number_or(node, path, "oracle_tol", config.oracle_tol);
  if (!(config.oracle_tol > 0.0)) fail(path + ".oracle_tol", "must be positive");
}

SweepSpec parse_sweep(const json& node, const std::string& path) {
  expect_object(node, path);
  reject_unknown_keys(node, path, {"parameter", "values"});
  SweepSpec spec;
  spec.parameter = get_string_or(node, path, "parameter", "");
  if (spec.parameter.empty()) fail(path + ".parameter", "missing required field");
  const json& values = member(node, path, "values");
  if (!values.is_array() || values.empty()) fail(path + ".values", "expected a non-empty array");
  for (const auto& v : values) {
    if (v.is_boolean()) {
      spec.values.push_back(v.get<bool>() ? 1.0 : 0.0);
    } else if (v.is_number()) {
      spec.values.push_back(v.get<double>());
    } else {
      fail(path + ".values", "expected numbers (or booleans for clipping)");
    }
  }
  return spec;
}

void parse_output(const json& node, const std::string& path, ExperimentConfig& config) {
  expect_object(node, path);
  reject_unknown_keys(node, path, {"directory", "formats"});
  config.output_dir = get_string_or(node, path, "directory", config.output_dir);
  if (node.contains("formats")) {
    const json& formats = node.at("formats");
    if (!formats.is_array()) fail(path + ".formats", "expected an array");
    config.formats.clear();
    for (const auto& f : formats) {
      if (!f.is_string()) fail(path + ".formats", "formats must be strings");
      const std::string name = f.get<std::string>();
      if (name != "csv" && name != "json") fail(path + ".formats", "supported: csv, json");
      config.formats.push_back(name);
    }
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& err) {
    std::ostringstream where;
    where << "$ (byte " << err.byte << ")";
    throw ParseError(where.str(), err.what());
  }
  expect_object(root, "$");
  reject_unknown_keys(root, "$",
                      {"problem", "graph", "noise", "schedules", "run", "sweep", "output"});

  ExperimentConfig config;
  config.problem = parse_problem(member(root, "$", "problem"), "$.problem");
  if (root.contains("graph")) config.graph = parse_graph(root.at("graph"), "$.graph");
  if (root.contains("noise")) config.noise = parse_noise(root.at("noise"), "$.noise");
  config.schedules = parse_schedules(member(root, "$", "schedules"), "$.schedules");
  if (root.contains("run")) parse_run(root.at("run"), "$.run", config);
  if (root.contains("sweep")) config.sweep = parse_sweep(root.at("sweep"), "$.sweep");
  if (root.contains("output")) parse_output(root.at("output"), "$.output", config);
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, "cannot open config file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string canonical_config(const ExperimentConfig& config) {
  json root;

  json problem;
  problem["preset"] = config.problem.preset == ProblemSpec::Preset::PaperV ? "paper-v" : "inline";
  problem["mu_ridge"] = config.problem.mu_ridge;
  if (config.problem.omega_kind == ConstraintSet::Kind::Box) {
    problem["omega"] = {{"kind", "box"},
                        {"lower", config.problem.box_lower},
                        {"upper", config.problem.box_upper}};
  } else {
    problem["omega"] = {{"kind", "ball"}, {"radius", config.problem.ball_radius}};
  }
  if (config.problem.preset == ProblemSpec::Preset::Inline) {
    problem["labels"] = config.problem.labels;
    json features = json::array();
    for (const auto& q : config.problem.features) {
      json row = json::array();
      for (Eigen::Index d = 0; d < q.size(); ++d) row.push_back(q[d]);
      features.push_back(std::move(row));
    }
    problem["features"] = std::move(features);
  }
  root["problem"] = std::move(problem);

  json graph;
  if (config.graph.preset == GraphSpec::Preset::Paper) {
    graph["preset"] = "paper";
  } else {
    graph["preset"] = "edge-list";
    graph["n"] = config.graph.n;
    json edges = json::array();
    for (const auto& e : config.graph.edges) edges.push_back({e.i, e.j, e.weight});
    graph["edges"] = std::move(edges);
  }
  root["graph"] = std::move(graph);

  json noise;
  switch (config.noise.kind) {
    case NoiseModel::Kind::ShiftedPareto:
      noise = {{"kind", "shifted_pareto"}, {"gamma", config.noise.gamma},
               {"w_min", config.noise.w_min}};
      break;
    case NoiseModel::Kind::Gaussian:
      noise = {{"kind", "gaussian"}, {"sigma", config.noise.sigma}};
      break;
    case NoiseModel::Kind::Zero:
      noise = {{"kind", "zero"}};
      break;
  }
  root["noise"] = std::move(noise);

  root["schedules"] = {{"alpha_coeff", config.schedules.alpha_coeff},
                       {"alpha_exp", config.schedules.alpha_exp},
                       {"tau_coeff", config.schedules.tau_coeff},
                       {"tau_exp", config.schedules.tau_exp},
                       {"delta", config.schedules.delta}};

  json run;
  run["iterations"] = config.iterations;
  run["stride"] = config.stride;
  run["master_seed"] = config.master_seed;
  if (config.seeds.empty()) {
    run["num_seeds"] = config.num_seeds;
  } else {
    run["seeds"] = config.seeds;
  }
  run["clipping"] = config.clipping_modes;
  run["override_schedule_check"] = config.override_schedule_check;
  run["exclude_divergent"] = config.exclude_divergent;
  run["oracle_tol"] = config.oracle_tol;
  root["run"] = std::move(run);

  if (!config.sweep.parameter.empty()) {
    root["sweep"] = {{"parameter", config.sweep.parameter}, {"values", config.sweep.values}};
  }
  return root.dump();
}

std::string config_hash(const ExperimentConfig& config) {
  const std::string canonical = canonical_config(config);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << hash;
  return out.str();
}

}  // namespace declip
