#include "cfrag/report_json.hpp"

#include <charconv>
#include <cmath>

#include "cfrag/config.hpp"

namespace cfrag {

using nlohmann::json;

namespace {

json real_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json species_map(const ReactionNetwork& chem, const std::vector<Count>& totals) {
  json out = json::object();
  for (std::size_t i = 0; i < totals.size(); ++i) out[chem.species()[i]] = totals[i];
  return out;
}

json species_map(const ReactionNetwork& chem, const std::vector<double>& totals) {
  json out = json::object();
  for (std::size_t i = 0; i < totals.size(); ++i) out[chem.species()[i]] = real_or_null(totals[i]);
  return out;
}

}  // namespace

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json population_to_json(const ReactionNetwork& chem, const PopulationState& n) {
  json out = json::array();
  for (const auto& [x, k] : n) out.push_back({{"content", content_to_json(chem, x)}, {"count", k}});
  return out;
}

json report_to_json(const CompartmentModel& model, const SimulationReport& r) {
  const auto& chem = model.chemistry();
  json j;
  j["seed"] = r.seed;
  j["final_time"] = r.final_time;
  j["event_count"] = r.event_count;
  json kinds = json::object();
  for (std::size_t k = 0; k < kChannelKindCount; ++k) {
    kinds[std::string(to_string(static_cast<ChannelKind>(k)))] = r.events_by_kind[k];
  }
  j["events_by_kind"] = kinds;
  j["stop_reason"] = std::string(to_string(r.stop_reason));
  j["suspected_explosion"] = r.suspected_explosion;
  j["overflow"] = r.overflow;
  j["final_state"] = population_to_json(chem, r.final_state);
  j["final_compartments"] = total_compartments(r.final_state);
  std::vector<Count> totals;
  for (std::size_t i = 0; i < chem.dimension(); ++i) totals.push_back(species_total(r.final_state, i));
  j["final_species_totals"] = species_map(chem, totals);
  json grid = json::array();
  for (const auto& g : r.grid) {
    json row = {{"time", g.time}, {"C", g.compartments}, {"species", species_map(chem, g.species_totals)}};
    if (g.substrate_without_enzyme) row["S_hat"] = *g.substrate_without_enzyme;
    grid.push_back(row);
  }
  j["grid"] = grid;
  json hits = json::array();
  for (const auto& h : r.hits) {
    hits.push_back({{"name", h.name},
                    {"visits", h.visits},
                    {"first_time", h.first_time ? json(*h.first_time) : json(nullptr)}});
  }
  j["hits"] = hits;
  return j;
}

json summary_to_json(const CompartmentModel& model, const EnsembleSummary& s) {
  const auto& chem = model.chemistry();
  json j;
  j["trajectories"] = s.trajectories;
  j["median_final_compartments"] = real_or_null(s.median_final_compartments);
  j["median_final_mass"] = real_or_null(s.median_final_mass);
  j["median_final_species"] = species_map(chem, s.median_final_species);
  j["hit_fraction"] = s.hit_fraction;
  json times = json::array();
  for (double t : s.mean_first_hit_time) times.push_back(real_or_null(t));
  j["mean_first_hit_time"] = times;
  j["explosion_fraction"] = s.explosion_fraction;
  json grid = json::array();
  for (std::size_t g = 0; g < s.grid_times.size(); ++g) {
    grid.push_back({{"time", s.grid_times[g]},
                    {"mean_C", s.mean_grid_compartments[g]},
                    {"mean_species", species_map(chem, s.mean_grid_species[g])}});
  }
  j["grid"] = grid;
  return j;
}

json report_to_json(const OneEnzymeReport& r) {
  return {{"seed", r.seed},
          {"final_substrate", r.final_substrate},
          {"final_time", r.final_time},
          {"event_count", r.event_count},
          {"growth_events", r.growth_events},
          {"fragmentation_events", r.fragmentation_events},
          {"stop_reason", std::string(to_string(r.stop_reason))},
          {"suspected_explosion", r.suspected_explosion},
          {"overflow", r.overflow},
          {"returns_below", r.returns_below},
          {"return_threshold", r.return_threshold},
          {"max_substrate", r.max_substrate}};
}

json report_to_json(const DriftReport& r) {
  json violations = json::array();
  for (const auto& v : r.violations) {
    violations.push_back({{"state", v.state}, {"drift", v.drift}, {"bound", v.bound}});
  }
  return {{"region_checked", r.region_checked},
          {"passed", r.passed()},
          {"violation_count", r.violation_count},
          {"violations", violations},
          {"states_checked", r.states_checked},
          {"states_in_scope", r.states_in_scope},
          {"max_drift", real_or_null(r.max_drift)},
          {"min_drift", real_or_null(r.min_drift)},
          {"max_excess", real_or_null(r.max_excess)},
          {"certificate_params", r.certificate_params},
          {"truncation_error_bound", r.truncation_error_bound},
          {"tolerance", r.tolerance}};
}

json classification_to_json(const Model4Params& p, const Classification& c) {
  json j;
  j["parameters"] = {{"kappa_b", p.kappa_b}, {"kappa_d", p.kappa_d}, {"kappa_I", p.kappa_I},
                     {"kappa_E", p.kappa_E}, {"kappa_F", p.kappa_F}, {"kappa_C", p.kappa_C},
                     {"lambda", p.lambda}};
  j["non_explosive"] = c.non_explosive;
  j["regime"] = std::string(to_string(c.regime));
  j["condition"] = c.condition;
  j["reason"] = c.reason;
  j["tags"] = c.tags;
  if (c.alpha_interval) {
    j["alpha_interval"] = {real_or_null(c.alpha_interval->first), real_or_null(c.alpha_interval->second)};
  }
  if (c.certificate) {
    const auto& cert = *c.certificate;
    json cj = {{"alpha", cert.alpha}};
    if (cert.epsilon) cj["epsilon"] = *cert.epsilon;
    if (cert.k_epsilon) cj["k_epsilon"] = *cert.k_epsilon;
    if (cert.c_bound) cj["exceptional_c_bound"] = *cert.c_bound;
    if (cert.s_bound) cj["exceptional_s_bound"] = *cert.s_bound;
    j["certificate"] = cj;
  }
  j["subcases"] = c.subcases;
  return j;
}

}  // namespace cfrag
