#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "cfrag/crn.hpp"
#include "cfrag/inflow.hpp"
#include "cfrag/kernel.hpp"
#include "cfrag/population.hpp"

namespace cfrag {

/// Compartment-level rate constants.
struct CompartmentRates {
  double inflow = 0.0;         ///< kappa_I, 0 -> C
  double exit = 0.0;           ///< kappa_E, C -> 0 (contents deleted)
  double fragmentation = 0.0;  ///< kappa_F, C -> 2C at kappa_F * S(x) per compartment
  double coagulation = 0.0;    ///< kappa_C, 2C -> C per unordered pair
};

/// Chemistry running inside independent compartments that enter, leave,
/// split at a rate proportional to one designated species, and merge.
/// Immutable after construction.
class CompartmentModel {
 public:
  CompartmentModel(ReactionNetwork chemistry, CompartmentRates rates,
                   std::size_t fragmentation_species, InflowDistribution inflow,
                   FragmentationKernel kernel);

  const ReactionNetwork& chemistry() const noexcept { return chemistry_; }
  const CompartmentRates& rates() const noexcept { return rates_; }
  std::size_t fragmentation_species() const noexcept { return fragmentation_species_; }
  const InflowDistribution& inflow() const noexcept { return inflow_; }
  const FragmentationKernel& kernel() const noexcept { return kernel_; }
  std::size_t dimension() const noexcept { return chemistry_.dimension(); }

  /// (enzyme, substrate) species indices when the kernel is enzyme_substrate.
  std::optional<std::pair<std::size_t, std::size_t>> enzyme_pair() const;

 private:
  ReactionNetwork chemistry_;
  CompartmentRates rates_;
  std::size_t fragmentation_species_ = 0;
  InflowDistribution inflow_;
  FragmentationKernel kernel_;
};

enum class ChannelKind { inflow, internal, exit, fragmentation, coagulation };

inline constexpr std::size_t kChannelKindCount = 5;

std::string_view to_string(ChannelKind kind) noexcept;

/// One positive-rate transition class of the population process.
///
/// internal: reaction `reaction` inside a compartment holding `content`;
/// exit / fragmentation: a compartment holding `content`;
/// coagulation: a compartment holding `content` merges with one holding
/// `partner` (equal contents for a same-content pair).
struct EventChannel {
  ChannelKind kind = ChannelKind::inflow;
  Complex content;
  Complex partner;
  std::size_t reaction = 0;
  double rate = 0.0;
};

/// Channels in canonical order: inflow; then for each content in
/// lexicographic order its internal reactions (declaration order), exit and
/// fragmentation; then coagulation pairs (x <= y) in lexicographic order.
std::vector<EventChannel> event_channels(const CompartmentModel& model, const PopulationState& n);

using PopulationFunction = std::function<double(const PopulationState&)>;

/// |V(n + e_x) - V(n)| <= constant + per_unit_mass * |x| for every inflow
/// content x. Needed to bound the error of a truncated inflow law.
struct IncrementBound {
  double constant = 0.0;
  double per_unit_mass = 0.0;
};

struct GeneratorValue {
  double value = 0.0;
  /// Bound on |exact - value| caused by inflow truncation (0 if none).
  double truncation_error = 0.0;
};

/// (L V)(n): exact sum of internal chemistry, inflow, exit, fragmentation
/// and both coagulation terms. Throws ModelError when the inflow law is
/// truncated and no increment bound is supplied.
GeneratorValue apply_population_generator(const CompartmentModel& model, const PopulationFunction& V,
                                          const PopulationState& n,
                                          std::optional<IncrementBound> bound = std::nullopt);

}  // namespace cfrag
