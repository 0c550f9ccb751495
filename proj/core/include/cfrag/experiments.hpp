#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cfrag/config.hpp"

namespace cfrag {

/// Outcome of a named preset: one CSV row per trajectory plus an aggregate
/// block with the qualitative outcome evaluation.
struct ExperimentResult {
  std::string preset;
  std::uint64_t master_seed = 0;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  nlohmann::json aggregate;
  /// Outcome of the preset's pass/fail checks (true when it has none).
  bool passed = true;
};

/// threshold-scan, duso-zechner, explosivity-probe, projection-crn.
const std::vector<std::string>& preset_names();

/// Model configurations a preset runs (one per ensemble). Empty for
/// presets that do not run a compartment model. Throws ConfigError for an
/// unknown preset.
std::vector<ModelConfig> preset_configs(const std::string& name);

/// Runs a preset. `threads` = 0 uses hardware concurrency; results do not
/// depend on it. Throws ConfigError for an unknown preset.
ExperimentResult run_experiment(const std::string& name, std::uint64_t master_seed, unsigned threads = 0);

std::string rows_to_csv(const ExperimentResult& result);

}  // namespace cfrag
