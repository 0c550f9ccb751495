#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cfrag/compartment_model.hpp"
#include "cfrag/population.hpp"
#include "cfrag/run_control.hpp"

namespace cfrag {

enum class Observable { compartments, species, mass, substrate_without_enzyme };

/// Stop once the observable reaches `threshold`.
struct ObservableBound {
  Observable observable = Observable::compartments;
  std::size_t species = 0;  ///< for Observable::species
  double threshold = 0.0;
};

/// At least one of t_max, event_budget or observable_bound must be set.
struct StopCondition {
  std::optional<double> t_max;
  std::optional<std::uint64_t> event_budget;
  /// Stop with StopReason::absorbed as soon as this holds.
  std::function<bool(const PopulationState&)> absorbing;
  std::optional<ObservableBound> observable_bound;
};

/// Tracks visits to a set of states from time `t_from` on. A visit is an
/// entry into the set; being inside the set at time t_from counts as one.
struct HitPredicate {
  std::string name;
  std::function<bool(const PopulationState&)> predicate;
  double t_from = 0.0;
};

struct HitRecord {
  std::string name;
  std::optional<double> first_time;
  std::uint64_t visits = 0;
};

struct GridPoint {
  double time = 0.0;
  Count compartments = 0;
  std::vector<Count> species_totals;
  std::optional<Count> substrate_without_enzyme;
};

/// Passed to the event observer after each event.
struct EventRecord {
  double time = 0.0;
  ChannelKind kind = ChannelKind::inflow;
  Count compartments = 0;
  const std::vector<Count>* species_totals = nullptr;
  std::optional<Count> substrate_without_enzyme;
  /// Contents consumed by the event (empty for inflow).
  const std::vector<Complex>* touched = nullptr;
  const PopulationState* state = nullptr;
};

struct RunOptions {
  /// Observation times, non-decreasing.
  std::vector<double> grid;
  std::vector<HitPredicate> hits;
  /// Called after every event. Ignored by run_ensemble.
  std::function<void(const EventRecord&)> observer;
  /// Recompute totals after every event and check each event's bookkeeping
  /// (mass changes only through inflow, exit and chemistry). Slow.
  bool validate_events = false;
};

struct SimulationReport {
  PopulationState final_state;
  double final_time = 0.0;
  std::uint64_t event_count = 0;
  std::array<std::uint64_t, kChannelKindCount> events_by_kind{};
  StopReason stop_reason = StopReason::time;
  bool suspected_explosion = false;
  /// A counter would have exceeded 2^64 - 1; the run stopped on budget.
  bool overflow = false;
  std::vector<GridPoint> grid;
  std::vector<HitRecord> hits;
  std::uint64_t seed = 0;
};

/// Exact stochastic simulation (direct method). Channels are selected in the
/// order of event_channels().
SimulationReport run_trajectory(const CompartmentModel& model, const PopulationState& initial,
                                const StopCondition& stop, std::uint64_t seed,
                                const RunOptions& options = {});

struct EnsembleSummary {
  std::size_t trajectories = 0;
  double median_final_compartments = 0.0;
  double median_final_mass = 0.0;
  std::vector<double> median_final_species;
  /// Per hit predicate: fraction of trajectories with at least one visit.
  std::vector<double> hit_fraction;
  /// Per hit predicate: mean first visit time over trajectories that visited
  /// (NaN if none did).
  std::vector<double> mean_first_hit_time;
  double explosion_fraction = 0.0;
  std::vector<double> grid_times;
  std::vector<double> mean_grid_compartments;
  std::vector<std::vector<double>> mean_grid_species;  ///< [grid point][species]
};

struct EnsembleResult {
  std::vector<SimulationReport> reports;  ///< by trajectory index
  EnsembleSummary summary;
};

/// Runs `count` trajectories with seeds derive_seed(master_seed, i) on up to
/// `threads` workers (0: hardware concurrency). Results do not depend on the
/// thread count.
EnsembleResult run_ensemble(const CompartmentModel& model, const PopulationState& initial,
                            const StopCondition& stop, std::uint64_t master_seed, std::size_t count,
                            const RunOptions& options = {}, unsigned threads = 0);

EnsembleSummary summarize(const std::vector<SimulationReport>& reports, std::size_t dimension);

double median(std::vector<double> values);

}  // namespace cfrag
