#pragma once

#include <iosfwd>
#include <string>

#include "declip/experiment.hpp"

namespace declip {

// Parses a JSON experiment config. Unknown keys, wrong types and bad values
// raise ParseError carrying the dotted field path.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Canonical JSON of the semantic config; equal configs serialize equally.
std::string canonical_config(const ExperimentConfig& config);

// FNV-1a 64 over the canonical form, hex-encoded. Changes iff the semantic
// config changes.
std::string config_hash(const ExperimentConfig& config);

}  // namespace declip
