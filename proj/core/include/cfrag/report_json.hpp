#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "cfrag/compartment_model.hpp"
#include "cfrag/lyapunov.hpp"
#include "cfrag/one_enzyme.hpp"
#include "cfrag/regime.hpp"
#include "cfrag/simulator.hpp"

namespace cfrag {

/// Shortest decimal text that parses back to the same double.
std::string format_real(double v);

nlohmann::json population_to_json(const ReactionNetwork& chemistry, const PopulationState& n);
nlohmann::json report_to_json(const CompartmentModel& model, const SimulationReport& report);
nlohmann::json summary_to_json(const CompartmentModel& model, const EnsembleSummary& summary);
nlohmann::json report_to_json(const OneEnzymeReport& report);
nlohmann::json report_to_json(const DriftReport& report);
nlohmann::json classification_to_json(const Model4Params& params, const Classification& c);

}  // namespace cfrag
