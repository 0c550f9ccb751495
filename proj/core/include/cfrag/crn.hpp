#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cfrag/run_control.hpp"

namespace cfrag {

using Count = std::uint64_t;

/// Non-negative integer vector indexed by species: a complex, a compartment
/// content or the state of a plain network.
using Complex = std::vector<Count>;
using CrnState = Complex;
using Delta = std::vector<std::int64_t>;

Count checked_add(Count a, Count b);
Count checked_sub(Count a, Count b);
Count checked_mul(Count a, Count b);

/// Sum of all coordinates, overflow-checked.
Count total_mass(const Complex& x);

/// x + delta, throwing OverflowError if a coordinate leaves [0, 2^64).
Complex apply_delta(const Complex& x, const Delta& delta);

/// Binomial coefficient C(x, y) as an exact integer, or nullopt when it does
/// not fit in 64 bits. C(x, 0) = 1 and C(x, y) = 0 for x < y.
std::optional<Count> binomial_exact(Count x, Count y);

/// C(x, y) as a double. Exact (then rounded to the nearest double) while the
/// integer fits in 64 bits; past that boundary the multiplicative
/// falling-factorial product is accumulated in long double, and for
/// min(y, x - y) > 4096 the log-gamma form is used.
double falling_binomial(Count x, Count y);

struct Reaction {
  Complex source;
  Complex product;
  double rate_constant = 0.0;
};

class ReactionNetwork {
 public:
  ReactionNetwork() = default;
  ReactionNetwork(std::vector<std::string> species, std::vector<Reaction> reactions);

  std::size_t dimension() const noexcept { return species_.size(); }
  const std::vector<std::string>& species() const noexcept { return species_; }
  const std::vector<Reaction>& reactions() const noexcept { return reactions_; }
  const Delta& delta(std::size_t reaction) const { return deltas_.at(reaction); }

  /// Reactions with a strictly positive rate constant, in declaration order.
  /// These are the simulation channels; zero-rate reactions stay in
  /// reactions() but never fire.
  const std::vector<std::size_t>& active_reactions() const noexcept { return active_; }

  std::optional<std::size_t> find_species(std::string_view name) const;
  std::size_t species_index(std::string_view name) const;

  /// Human-readable "E + 2S -> E + 3S" form.
  std::string describe(std::size_t reaction) const;

 private:
  std::vector<std::string> species_;
  std::vector<Reaction> reactions_;
  std::vector<Delta> deltas_;
  std::vector<std::size_t> active_;
};

/// kappa * prod_j C(x_j, nu_j).
double mass_action_rate(const Reaction& reaction, const CrnState& state);

struct Transition {
  Delta delta;
  double rate = 0.0;
  std::size_t reaction = 0;
};

/// One entry per reaction with strictly positive rate at `state`.
std::vector<Transition> enabled_transitions(const ReactionNetwork& network,
                                            const CrnState& state);

using CrnFunction = std::function<double(const CrnState&)>;

/// (A f)(x) = sum over reactions of lambda(x) * (f(x + nu' - nu) - f(x)).
double apply_crn_generator(const ReactionNetwork& network, const CrnFunction& f,
                           const CrnState& state);

struct CrnStopCondition {
  std::optional<double> t_max;
  std::optional<std::uint64_t> event_budget;
  std::function<bool(const CrnState&)> absorbing;
};

struct CrnEvent {
  double time = 0.0;
  std::size_t reaction = 0;
};

struct CrnRunReport {
  CrnState final_state;
  double final_time = 0.0;
  std::uint64_t event_count = 0;
  StopReason stop_reason = StopReason::time;
  bool suspected_explosion = false;
  bool overflow = false;
  std::uint64_t seed = 0;
  std::vector<CrnEvent> events;  ///< filled only when requested
};

/// Direct-method exact simulation of a plain network. Deterministic in
/// (network, initial, stop, seed).
CrnRunReport simulate_crn(const ReactionNetwork& network, const CrnState& initial,
                          const CrnStopCondition& stop, std::uint64_t seed,
                          bool record_events = false);

}  // namespace cfrag
