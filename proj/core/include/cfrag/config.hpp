#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cfrag/compartment_model.hpp"
#include "cfrag/population.hpp"

namespace cfrag {

struct SimulationSettings {
  std::optional<double> t_max;
  std::optional<std::uint64_t> event_budget;
  std::vector<double> grid;
  std::uint64_t seed = 0;
  std::size_t trajectories = 1;
  PopulationState initial;
};

struct ModelConfig {
  CompartmentModel model;
  SimulationSettings simulation;
};

/// Parses a JSON model document:
///
///   chemistry:    { species: [names], reactions: [{source: {name: count}, product: {...}, rate}] }
///   compartments: { kappa_I, kappa_E, kappa_F, kappa_C, fragmentation_species: name }
///   inflow:       { kind: point_mass, content } | { kind: categorical, table: [{content, probability}] }
///                 | { kind: poisson_product, rates: {name: rate}, tail_bound }
///   kernel:       { kind: binomial_half | uniform_unordered_pairs }
///                 | { kind: enzyme_substrate, p, enzyme: name, substrate: name }
///                 | { kind: table, entries: [{parent, pmf: [{content, probability}]}] }
///   simulation:   { t_max, event_budget, grid: [times], seed, trajectories, initial: [{content, count}] }
///
/// Contents are objects from species name to count; absent species count 0.
/// Unknown keys raise ConfigError naming the dotted key.
ModelConfig parse_config(const nlohmann::json& doc);
ModelConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const ModelConfig& config);
nlohmann::json model_to_json(const CompartmentModel& model);

/// Content vector as {name: count} with zero entries omitted.
nlohmann::json content_to_json(const ReactionNetwork& chemistry, const Complex& x);

}  // namespace cfrag
