#include "declip/io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "declip/errors.hpp"

namespace declip {

namespace {

using nlohmann::json;

std::string sanitize(const std::string& name) {
  std::string out = name;
  for (char& c : out) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '.') c = '_';
  }
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path);
  return out;
}

json oracle_to_json(const OracleResult& oracle) {
  json node;
  json theta = json::array();
  for (Eigen::Index d = 0; d < oracle.theta_star.size(); ++d) {
    theta.push_back(oracle.theta_star[d]);
  }
  node["theta_star"] = std::move(theta);
  node["f_star"] = oracle.f_star;
  node["residual"] = oracle.residual;
  node["step"] = oracle.step;
  node["iterations"] = oracle.iterations;
  node["tol"] = oracle.tol;
  return node;
}

}  // namespace

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void write_run_csv(const std::string& path, const RunTrace& trace) {
  std::ofstream out = open_out(path);
  out << "k,dist_to_opt,consensus_err,subopt_gap\n";
  for (const auto& rec : trace.records) {
    out << rec.k << ',' << format_double(rec.dist_to_opt) << ','
        << format_double(rec.consensus_err) << ',' << format_double(rec.subopt_gap)
        << '\n';
  }
}

std::vector<TraceRecord> read_run_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "k,dist_to_opt,consensus_err,subopt_gap") {
    throw Error("unexpected run CSV header in " + path);
  }
  std::vector<TraceRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    TraceRecord rec;
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');
    rec.k = std::stol(cell);
    std::getline(row, cell, ',');
    rec.dist_to_opt = std::stod(cell);
    std::getline(row, cell, ',');
    rec.consensus_err = std::stod(cell);
    std::getline(row, cell, ',');
    rec.subopt_gap = std::stod(cell);
    records.push_back(rec);
  }
  return records;
}

void write_aggregate_csv(const std::string& path,
                         const std::vector<AggregateCurve>& curves) {
  std::ofstream out = open_out(path);
  out << "k,sweep_id,clipping,dist_median,dist_q25,dist_q75,"
         "consensus_median,consensus_q25,consensus_q75,"
         "gap_median,gap_q25,gap_q75\n";
  for (const auto& curve : curves) {
    for (std::size_t r = 0; r < curve.ks.size(); ++r) {
      out << curve.ks[r] << ',' << curve.sweep_id << ','
          << (curve.clipping ? "on" : "off") << ','
          << format_double(curve.dist.median[r]) << ','
          << format_double(curve.dist.q25[r]) << ','
          << format_double(curve.dist.q75[r]) << ','
          << format_double(curve.consensus.median[r]) << ','
          << format_double(curve.consensus.q25[r]) << ','
          << format_double(curve.consensus.q75[r]) << ','
          << format_double(curve.gap.median[r]) << ','
          << format_double(curve.gap.q25[r]) << ','
          << format_double(curve.gap.q75[r]) << '\n';
    }
  }
}

void write_oracle_artifact(const std::string& path, const OracleResult& oracle,
                           const std::string& config_hash) {
  json node = oracle_to_json(oracle);
  node["problem_hash"] = config_hash;
  std::ofstream out = open_out(path);
  out << node.dump(2) << '\n';
}

OracleResult load_oracle_artifact(const std::string& path, std::string* config_hash) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open oracle artifact: " + path);
  json node;
  try {
    in >> node;
  } catch (const json::parse_error& err) {
    throw ParseError(path, err.what());
  }
  OracleResult oracle;
  const auto& theta = node.at("theta_star");
  oracle.theta_star.resize(static_cast<Eigen::Index>(theta.size()));
  for (std::size_t d = 0; d < theta.size(); ++d) {
    oracle.theta_star[static_cast<Eigen::Index>(d)] = theta[d].get<double>();
  }
  oracle.f_star = node.at("f_star").get<double>();
  oracle.residual = node.at("residual").get<double>();
  oracle.step = node.at("step").get<double>();
  oracle.iterations = node.at("iterations").get<long>();
  oracle.tol = node.at("tol").get<double>();
  if (config_hash != nullptr) {
    *config_hash = node.value("problem_hash", std::string{});
  }
  return oracle;
}

PersistedExperiment persist_experiment(const ExperimentConfig& config,
                                       const ExperimentResult& result,
                                       const std::string& out_dir_override) {
  namespace fs = std::filesystem;
  const std::string out_dir =
      out_dir_override.empty() ? config.output_dir : out_dir_override;
  fs::create_directories(out_dir);

  const bool want_csv =
      std::find(config.formats.begin(), config.formats.end(), "csv") != config.formats.end();
  const bool want_json =
      std::find(config.formats.begin(), config.formats.end(), "json") != config.formats.end();

  PersistedExperiment persisted;

  if (want_csv) {
    for (const auto& record : result.runs) {
      std::ostringstream name;
      name << "run_" << sanitize(record.key.sweep_id) << '_'
           << (record.key.clipping ? "clip" : "noclip") << "_seed" << record.key.seed
           << ".csv";
      const std::string path = (fs::path(out_dir) / name.str()).string();
      write_run_csv(path, record.trace);
      persisted.run_files.push_back(path);
    }
    persisted.aggregate_file = (fs::path(out_dir) / "aggregate.csv").string();
    write_aggregate_csv(persisted.aggregate_file, result.curves);
  }

  if (want_json) {
    json manifest;
    manifest["config_hash"] = config_hash(config);
    manifest["master_seed"] = result.master_seed;
    manifest["seeds"] = resolve_seeds(config);
    manifest["iterations"] = config.iterations;
    manifest["stride"] = config.stride;
    manifest["total_diverged"] = result.total_diverged;

    json curves = json::array();
    for (const auto& curve : result.curves) {
      curves.push_back({{"sweep_id", curve.sweep_id},
                        {"clipping", curve.clipping},
                        {"n_runs", curve.n_runs},
                        {"n_diverged", curve.n_diverged},
                        {"final_median_dist", curve.final_median_dist},
                        {"auc_median_dist", curve.auc_median_dist}});
    }
    manifest["curves"] = std::move(curves);

    json oracles;
    for (const auto& [sweep_id, oracle] : result.oracles) {
      oracles[sweep_id] = oracle_to_json(oracle);
    }
    manifest["oracles"] = std::move(oracles);

    json files = json::array();
    for (const auto& f : persisted.run_files) files.push_back(fs::path(f).filename().string());
    manifest["run_files"] = std::move(files);

    persisted.manifest_file = (fs::path(out_dir) / "manifest.json").string();
    std::ofstream out = open_out(persisted.manifest_file);
    out << manifest.dump(2) << '\n';
  }

  return persisted;
}

}  // namespace declip
