#include "cfrag/crn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "cfrag/errors.hpp"
#include "cfrag/rng.hpp"

namespace cfrag {

namespace {
__extension__ typedef unsigned __int128 Wide;
}  // namespace

Count checked_add(Count a, Count b) {
  Count r = 0;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("count overflow in addition");
  return r;
}

Count checked_sub(Count a, Count b) {
  if (b > a) throw OverflowError("count underflow in subtraction");
  return a - b;
}

Count checked_mul(Count a, Count b) {
  Count r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("count overflow in multiplication");
  return r;
}

Count total_mass(const Complex& x) {
  Count m = 0;
  for (Count v : x) m = checked_add(m, v);
  return m;
}

Complex apply_delta(const Complex& x, const Delta& delta) {
  if (x.size() != delta.size()) throw ModelError("apply_delta: dimension mismatch");
  Complex out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (delta[i] >= 0) {
      out[i] = checked_add(x[i], static_cast<Count>(delta[i]));
    } else {
      out[i] = checked_sub(x[i], static_cast<Count>(-(delta[i] + 1)) + 1);
    }
  }
  return out;
}

std::optional<Count> binomial_exact(Count x, Count y) {
  if (y > x) return Count{0};
  y = std::min(y, x - y);
  Wide c = 1;
  for (Count i = 0; i < y; ++i) {
    // c == C(x, i) <= 2^64, so the product fits in 128 bits and the division
    // is exact.
    c = c * (x - i) / (i + 1);
    if (c > std::numeric_limits<Count>::max()) return std::nullopt;
  }
  return static_cast<Count>(c);
}

double falling_binomial(Count x, Count y) {
  if (y > x) return 0.0;
  if (auto exact = binomial_exact(x, y)) return static_cast<double>(*exact);
  const Count k = std::min(y, x - y);
  if (k > 4096) {
    const auto xd = static_cast<double>(x);
    const auto kd = static_cast<double>(k);
    return std::exp(std::lgamma(xd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(xd - kd + 1.0));
  }
  long double r = 1.0L;
  for (Count i = 0; i < k; ++i) {
    r *= static_cast<long double>(x - i) / static_cast<long double>(i + 1);
  }
  return static_cast<double>(r);
}

ReactionNetwork::ReactionNetwork(std::vector<std::string> species,
                                 std::vector<Reaction> reactions)
    : species_(std::move(species)), reactions_(std::move(reactions)) {
  std::set<std::string> seen;
  for (const auto& name : species_) {
    if (name.empty()) throw ModelError("species name must be non-empty");
    if (!seen.insert(name).second) throw ModelError("duplicate species name '" + name + "'");
  }
  const std::size_t d = species_.size();
  deltas_.reserve(reactions_.size());
  for (std::size_t r = 0; r < reactions_.size(); ++r) {
    const auto& rx = reactions_[r];
    if (rx.source.size() != d || rx.product.size() != d) {
      throw ModelError("reaction " + std::to_string(r) + ": complex dimension does not match species count");
    }
    if (!(rx.rate_constant >= 0.0) || !std::isfinite(rx.rate_constant)) {
      throw ModelError("reaction " + std::to_string(r) + ": rate constant must be finite and >= 0");
    }
    if (rx.source == rx.product) {
      throw ModelError("reaction " + std::to_string(r) + ": source and product complexes are identical");
    }
    Delta delta(d);
    for (std::size_t i = 0; i < d; ++i) {
      delta[i] = static_cast<std::int64_t>(rx.product[i]) - static_cast<std::int64_t>(rx.source[i]);
    }
    deltas_.push_back(std::move(delta));
    if (rx.rate_constant > 0.0) active_.push_back(r);
  }
}

std::optional<std::size_t> ReactionNetwork::find_species(std::string_view name) const {
  for (std::size_t i = 0; i < species_.size(); ++i) {
    if (species_[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t ReactionNetwork::species_index(std::string_view name) const {
  if (auto i = find_species(name)) return *i;
  throw ModelError("unknown species '" + std::string(name) + "'");
}

namespace {

std::string complex_text(const Complex& c, const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] == 0) continue;
    if (!out.empty()) out += " + ";
    if (c[i] != 1) out += std::to_string(c[i]);
    out += names[i];
  }
  return out.empty() ? "0" : out;
}

}  // namespace

std::string ReactionNetwork::describe(std::size_t reaction) const {
  const auto& rx = reactions_.at(reaction);
  return complex_text(rx.source, species_) + " -> " + complex_text(rx.product, species_);
}

double mass_action_rate(const Reaction& reaction, const CrnState& state) {
  if (reaction.source.size() != state.size()) {
    throw ModelError("mass_action_rate: state dimension does not match reaction");
  }
  if (reaction.rate_constant == 0.0) return 0.0;
  double rate = reaction.rate_constant;
  for (std::size_t j = 0; j < state.size(); ++j) {
    if (reaction.source[j] == 0) continue;
    if (state[j] < reaction.source[j]) return 0.0;
    rate *= falling_binomial(state[j], reaction.source[j]);
  }
  return rate;
}

std::vector<Transition> enabled_transitions(const ReactionNetwork& network,
                                            const CrnState& state) {
  std::vector<Transition> out;
  for (std::size_t r : network.active_reactions()) {
    const double rate = mass_action_rate(network.reactions()[r], state);
    if (rate > 0.0) out.push_back({network.delta(r), rate, r});
  }
  return out;
}

double apply_crn_generator(const ReactionNetwork& network, const CrnFunction& f,
                           const CrnState& state) {
  const double here = f(state);
  double sum = 0.0;
  for (std::size_t r : network.active_reactions()) {
    const double rate = mass_action_rate(network.reactions()[r], state);
    if (rate == 0.0) continue;
    sum += rate * (f(apply_delta(state, network.delta(r))) - here);
  }
  return sum;
}

CrnRunReport simulate_crn(const ReactionNetwork& network, const CrnState& initial,
                          const CrnStopCondition& stop, std::uint64_t seed,
                          bool record_events) {
  if (initial.size() != network.dimension()) {
    throw ModelError("simulate_crn: initial state has wrong dimension");
  }
  if (!stop.t_max && !stop.event_budget && !stop.absorbing) {
    throw ModelError("simulate_crn: stop condition needs at least one bound");
  }
  Rng rng(seed);
  CrnRunReport report;
  report.seed = seed;
  CrnState state = initial;
  double t = 0.0;
  ExplosionMonitor monitor;
  const auto& active = network.active_reactions();
  std::vector<double> rates(active.size());

  while (true) {
    if (stop.absorbing && stop.absorbing(state)) {
      report.stop_reason = StopReason::absorbed;
      break;
    }
    if (stop.event_budget && report.event_count >= *stop.event_budget) {
      report.stop_reason = StopReason::budget;
      break;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < active.size(); ++i) {
      rates[i] = mass_action_rate(network.reactions()[active[i]], state);
      total += rates[i];
    }
    if (total <= 0.0) {
      report.stop_reason = StopReason::absorbed;
      break;
    }
    const double dt = rng.exponential(total);
    if (stop.t_max && t + dt > *stop.t_max) {
      t = *stop.t_max;
      report.stop_reason = StopReason::time;
      break;
    }
    const double target = rng.uniform() * total;
    std::size_t chosen = active.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < active.size(); ++i) {
      if (rates[i] <= 0.0) continue;
      acc += rates[i];
      chosen = i;
      if (target < acc) break;
    }
    try {
      state = apply_delta(state, network.delta(active[chosen]));
    } catch (const OverflowError&) {
      report.overflow = true;
      report.stop_reason = StopReason::budget;
      break;
    }
    t += dt;
    monitor.record(dt);
    ++report.event_count;
    if (record_events) report.events.push_back({t, active[chosen]});
  }
  report.final_state = std::move(state);
  report.final_time = t;
  report.suspected_explosion =
      monitor.suspected(report.stop_reason == StopReason::budget && !report.overflow);
  return report;
}

}  // namespace cfrag
