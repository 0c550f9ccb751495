#pragma once

#include <cstdint>
#include <optional>

#include "cfrag/crn.hpp"
#include "cfrag/run_control.hpp"

namespace cfrag {

/// Substrate count x in the compartment holding a single enzyme, for the
/// chemistry E + S -> E + 2S at rate alpha, S inflow at rate 1 and
/// fragmentation at rate x (kappa_F = 1):
///   x -> x + 1       at rate alpha * x * (x - 1) + 1
///   x -> Bin(x, p)   at rate x
struct OneEnzymeStop {
  std::optional<double> t_max;
  std::optional<std::uint64_t> event_budget;
};

struct OneEnzymeReport {
  Count final_substrate = 0;
  double final_time = 0.0;
  std::uint64_t event_count = 0;
  std::uint64_t growth_events = 0;
  std::uint64_t fragmentation_events = 0;
  StopReason stop_reason = StopReason::time;
  bool suspected_explosion = false;
  bool overflow = false;
  /// Number of jumps from x >= return_threshold to x < return_threshold.
  std::uint64_t returns_below = 0;
  Count return_threshold = 0;
  Count max_substrate = 0;
  std::uint64_t seed = 0;
};

OneEnzymeReport run_one_enzyme_chain(double alpha, double p, Count initial_substrate,
                                     const OneEnzymeStop& stop, std::uint64_t seed,
                                     Count return_threshold = 10);

}  // namespace cfrag
