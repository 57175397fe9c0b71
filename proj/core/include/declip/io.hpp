#pragma once

#include <string>
#include <vector>

#include "declip/config.hpp"
#include "declip/experiment.hpp"
#include "declip/problem.hpp"

namespace declip {

// Doubles serialized with 17 significant digits so parsing a written file
// reproduces the in-memory value exactly.
std::string format_double(double value);

void write_run_csv(const std::string& path, const RunTrace& trace);
std::vector<TraceRecord> read_run_csv(const std::string& path);

void write_aggregate_csv(const std::string& path,
                         const std::vector<AggregateCurve>& curves);

// theta* artifact consumed by later runs.
void write_oracle_artifact(const std::string& path, const OracleResult& oracle,
                           const std::string& config_hash);
OracleResult load_oracle_artifact(const std::string& path, std::string* config_hash = nullptr);

struct PersistedExperiment {
  std::vector<std::string> run_files;
  std::string aggregate_file;
  std::string manifest_file;
};

// Writes raw per-run CSVs, the aggregate CSV and a JSON manifest under
// config.output_dir (or out_dir_override when non-empty). File contents are
// byte-stable for a fixed config and master seed.
PersistedExperiment persist_experiment(const ExperimentConfig& config,
                                       const ExperimentResult& result,
                                       const std::string& out_dir_override = "");

}  // namespace declip
