#include "cfrag/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "cfrag/errors.hpp"
#include "cfrag/rng.hpp"

namespace cfrag {

namespace {

struct Totals {
  Count compartments = 0;
  std::vector<Count> species;
  Count s_hat = 0;
  std::optional<std::pair<std::size_t, std::size_t>> enzyme_pair;

  Totals(std::size_t d, std::optional<std::pair<std::size_t, std::size_t>> pair)
      : species(d, 0), enzyme_pair(pair) {}

  void add(const Complex& x, Count k = 1) {
    compartments = checked_add(compartments, k);
    for (std::size_t i = 0; i < x.size(); ++i) species[i] = checked_add(species[i], checked_mul(x[i], k));
    if (enzyme_pair && x[enzyme_pair->first] == 0) {
      s_hat = checked_add(s_hat, checked_mul(x[enzyme_pair->second], k));
    }
  }

  void remove(const Complex& x, Count k = 1) {
    compartments -= k;
    for (std::size_t i = 0; i < x.size(); ++i) species[i] -= x[i] * k;
    if (enzyme_pair && x[enzyme_pair->first] == 0) s_hat -= x[enzyme_pair->second] * k;
  }

  Count mass() const {
    Count m = 0;
    for (Count v : species) m = checked_add(m, v);
    return m;
  }

  std::optional<Count> substrate_without_enzyme() const {
    if (!enzyme_pair) return std::nullopt;
    return s_hat;
  }
};

Totals recompute(const PopulationState& n, std::optional<std::pair<std::size_t, std::size_t>> pair) {
  Totals t(n.dimension(), pair);
  for (const auto& [x, k] : n) t.add(x, k);
  return t;
}

double observable_value(const ObservableBound& b, const Totals& totals) {
  switch (b.observable) {
    case Observable::compartments: return static_cast<double>(totals.compartments);
    case Observable::species:
      if (b.species >= totals.species.size()) throw ModelError("observable bound species out of range");
      return static_cast<double>(totals.species[b.species]);
    case Observable::mass: return static_cast<double>(totals.mass());
    case Observable::substrate_without_enzyme:
      if (!totals.enzyme_pair) throw ModelError("S_hat bound needs an enzyme_substrate kernel");
      return static_cast<double>(totals.s_hat);
  }
  return 0.0;
}

Complex merge(const Complex& a, const Complex& b) {
  Complex out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = checked_add(a[i], b[i]);
  return out;
}

struct Row {
  const Complex* content = nullptr;
  Count multiplicity = 0;
  std::size_t first_rate = 0;  // offset into the internal rate buffer
  double block = 0.0;
};

struct Choice {
  ChannelKind kind = ChannelKind::inflow;
  std::size_t row = 0;
  std::size_t partner = 0;
  std::size_t reaction = 0;  // index into active reactions
  bool valid = false;
};

class Engine {
 public:
  Engine(const CompartmentModel& model, const PopulationState& initial, const StopCondition& stop,
         std::uint64_t seed, const RunOptions& options)
      : model_(model),
        k_(model.rates()),
        active_(model.chemistry().active_reactions()),
        stop_(stop),
        options_(options),
        rng_(seed),
        state_(initial),
        totals_(recompute(initial, model.enzyme_pair())) {
    if (!stop.t_max && !stop.event_budget && !stop.observable_bound) {
      throw ModelError("stop condition needs t_max, event_budget or an observable bound");
    }
    if (stop.t_max && !(*stop.t_max >= 0.0)) throw ModelError("t_max must be >= 0");
    if (initial.dimension() != model.dimension()) throw ModelError("initial state dimension does not match model");
    if (!std::is_sorted(options.grid.begin(), options.grid.end())) throw ModelError("grid must be non-decreasing");
    report_.seed = seed;
    for (const auto& h : options.hits) report_.hits.push_back({h.name, std::nullopt, 0});
    armed_.assign(options.hits.size(), false);
    inside_.assign(options.hits.size(), false);
  }

  SimulationReport run() {
    const double inf = std::numeric_limits<double>::infinity();
    const double horizon = stop_.t_max.value_or(inf);
    while (true) {
      if (stop_.absorbing && stop_.absorbing(state_)) {
        finish(StopReason::absorbed, t_);
        break;
      }
      if (stop_.observable_bound &&
          observable_value(*stop_.observable_bound, totals_) >= stop_.observable_bound->threshold) {
        finish(StopReason::bound_hit, t_);
        break;
      }
      if (stop_.event_budget && report_.event_count >= *stop_.event_budget) {
        finish(StopReason::budget, t_);
        break;
      }
      const double total = compute_rates();
      if (!(total > 0.0)) {
        // Nothing can happen any more; the state is frozen up to the horizon.
        finish(StopReason::absorbed, horizon);
        break;
      }
      const double dt = rng_.exponential(total);
      const double t_next = t_ + dt;
      if (t_next > horizon) {
        finish(StopReason::time, horizon);
        t_ = horizon;
        break;
      }
      record_grid(t_next, false);
      arm_hits(t_next, false);
      const Choice c = select(total);
      try {
        apply(c);
      } catch (const OverflowError&) {
        report_.overflow = true;
        finish(StopReason::budget, t_);
        break;
      }
      t_ = t_next;
      monitor_.record(dt);
      ++report_.event_count;
      ++report_.events_by_kind[static_cast<std::size_t>(c.kind)];
      if (options_.validate_events) validate(c.kind);
      if (options_.observer) {
        EventRecord rec;
        rec.time = t_;
        rec.kind = c.kind;
        rec.compartments = totals_.compartments;
        rec.species_totals = &totals_.species;
        rec.substrate_without_enzyme = totals_.substrate_without_enzyme();
        rec.touched = &touched_;
        rec.state = &state_;
        options_.observer(rec);
      }
      update_hits();
    }
    report_.final_time = t_;
    report_.suspected_explosion =
        monitor_.suspected(report_.stop_reason == StopReason::budget && t_ < horizon);
    report_.final_state = std::move(state_);
    return std::move(report_);
  }

 private:
  void finish(StopReason reason, double until) {
    report_.stop_reason = reason;
    record_grid(until, true);
    arm_hits(until, true);
  }

  void record_grid(double limit, bool inclusive) {
    const auto& grid = options_.grid;
    while (next_grid_ < grid.size() && (grid[next_grid_] < limit || (inclusive && grid[next_grid_] <= limit))) {
      report_.grid.push_back({grid[next_grid_], totals_.compartments, totals_.species,
                              totals_.substrate_without_enzyme()});
      ++next_grid_;
    }
  }

  void arm_hits(double limit, bool inclusive) {
    for (std::size_t h = 0; h < options_.hits.size(); ++h) {
      const auto& hp = options_.hits[h];
      if (armed_[h] || !(hp.t_from < limit || (inclusive && hp.t_from <= limit))) continue;
      armed_[h] = true;
      inside_[h] = hp.predicate(state_);
      if (inside_[h]) {
        ++report_.hits[h].visits;
        report_.hits[h].first_time = std::max(t_, hp.t_from);
      }
    }
  }

  void update_hits() {
    for (std::size_t h = 0; h < options_.hits.size(); ++h) {
      if (!armed_[h]) continue;
      const bool now = options_.hits[h].predicate(state_);
      if (now && !inside_[h]) {
        ++report_.hits[h].visits;
        if (!report_.hits[h].first_time) report_.hits[h].first_time = t_;
      }
      inside_[h] = now;
    }
  }

  double compute_rates() {
    const auto& reactions = model_.chemistry().reactions();
    const std::size_t frag = model_.fragmentation_species();
    rows_.clear();
    internal_.clear();
    double total = k_.inflow;
    for (const auto& [x, n] : state_) {
      Row row{&x, n, internal_.size(), 0.0};
      const auto m = static_cast<double>(n);
      double block = 0.0;
      for (std::size_t r : active_) {
        const double rate = m * mass_action_rate(reactions[r], x);
        internal_.push_back(rate);
        block += rate;
      }
      block += k_.exit * m;
      block += k_.fragmentation * static_cast<double>(x[frag]) * m;
      row.block = block;
      total += block;
      rows_.push_back(row);
    }
    const auto c = static_cast<double>(totals_.compartments);
    coag_total_ = k_.coagulation * c * (c - 1.0) / 2.0;
    return total + coag_total_;
  }

  // Last positive channel of row i, or an invalid choice.
  Choice last_in_row(std::size_t i) const {
    const Row& row = rows_[i];
    const auto m = static_cast<double>(row.multiplicity);
    if (k_.fragmentation * static_cast<double>((*row.content)[model_.fragmentation_species()]) * m > 0.0) {
      return {ChannelKind::fragmentation, i, 0, 0, true};
    }
    if (k_.exit * m > 0.0) return {ChannelKind::exit, i, 0, 0, true};
    for (std::size_t r = active_.size(); r-- > 0;) {
      if (internal_[row.first_rate + r] > 0.0) return {ChannelKind::internal, i, 0, r, true};
    }
    return {};
  }

  // Last positive channel overall; used when rounding pushes the target past
  // the final channel.
  Choice last_channel() const {
    if (coag_total_ > 0.0) {
      if (rows_.size() >= 2) return {ChannelKind::coagulation, rows_.size() - 2, rows_.size() - 1, 0, true};
      return {ChannelKind::coagulation, 0, 0, 0, true};
    }
    for (std::size_t i = rows_.size(); i-- > 0;) {
      const Choice c = last_in_row(i);
      if (c.valid) return c;
    }
    if (k_.inflow > 0.0) return {ChannelKind::inflow, 0, 0, 0, true};
    throw std::logic_error("channel selection found no positive rate");
  }

  Choice select(double total) {
    double target = rng_.uniform() * total;
    if (k_.inflow > 0.0) {
      if (target < k_.inflow) return {ChannelKind::inflow, 0, 0, 0, true};
      target -= k_.inflow;
    }
    const std::size_t frag = model_.fragmentation_species();
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const Row& row = rows_[i];
      if (!(target < row.block)) {
        target -= row.block;
        continue;
      }
      const auto m = static_cast<double>(row.multiplicity);
      for (std::size_t r = 0; r < active_.size(); ++r) {
        const double rate = internal_[row.first_rate + r];
        if (rate > 0.0 && target < rate) return {ChannelKind::internal, i, 0, r, true};
        target -= rate;
      }
      const double exit = k_.exit * m;
      if (exit > 0.0 && target < exit) return {ChannelKind::exit, i, 0, 0, true};
      target -= exit;
      const double split = k_.fragmentation * static_cast<double>((*row.content)[frag]) * m;
      if (split > 0.0 && target < split) return {ChannelKind::fragmentation, i, 0, 0, true};
      return last_in_row(i);
    }
    if (coag_total_ > 0.0) {
      suffix_.assign(rows_.size(), 0);
      Count after = 0;
      for (std::size_t i = rows_.size(); i-- > 0;) {
        suffix_[i] = after;
        after += rows_[i].multiplicity;
      }
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        const auto ni = static_cast<double>(rows_[i].multiplicity);
        const double same = k_.coagulation * ni * (ni - 1.0) / 2.0;
        const double row_rate = same + k_.coagulation * ni * static_cast<double>(suffix_[i]);
        if (!(target < row_rate)) {
          target -= row_rate;
          continue;
        }
        if (same > 0.0 && target < same) return {ChannelKind::coagulation, i, i, 0, true};
        target -= same;
        std::size_t last = i;
        for (std::size_t j = i + 1; j < rows_.size(); ++j) {
          const double rate = k_.coagulation * ni * static_cast<double>(rows_[j].multiplicity);
          if (target < rate) return {ChannelKind::coagulation, i, j, 0, true};
          target -= rate;
          last = j;
        }
        return {ChannelKind::coagulation, i, last, 0, true};
      }
    }
    return last_channel();
  }

  void add(const Complex& x) {
    totals_.add(x);
    state_.add(x);
  }

  void remove(const Complex& x) {
    state_.remove(x);
    totals_.remove(x);
  }

  void apply(const Choice& c) {
    touched_.clear();
    if (c.kind != ChannelKind::inflow) touched_.push_back(*rows_[c.row].content);
    if (c.kind == ChannelKind::coagulation) touched_.push_back(*rows_[c.partner].content);
    switch (c.kind) {
      case ChannelKind::inflow: {
        add(model_.inflow().sample(rng_));
        return;
      }
      case ChannelKind::internal: {
        const Complex x = *rows_[c.row].content;
        const Complex moved = apply_delta(x, model_.chemistry().delta(active_[c.reaction]));
        remove(x);
        add(moved);
        return;
      }
      case ChannelKind::exit: {
        const Complex x = *rows_[c.row].content;
        remove(x);
        return;
      }
      case ChannelKind::fragmentation: {
        const Complex x = *rows_[c.row].content;
        auto [y, z] = model_.kernel().sample(x, rng_);
        remove(x);
        add(y);
        add(z);
        return;
      }
      case ChannelKind::coagulation: {
        const Complex x = *rows_[c.row].content;
        const Complex y = *rows_[c.partner].content;
        const Complex merged = merge(x, y);
        remove(x);
        remove(y);
        add(merged);
        return;
      }
    }
  }

  void validate(ChannelKind kind) {
    const Totals fresh = recompute(state_, model_.enzyme_pair());
    if (fresh.compartments != totals_.compartments || fresh.species != totals_.species ||
        fresh.s_hat != totals_.s_hat) {
      throw std::logic_error("running totals diverged from the state");
    }
    if (previous_valid_) {
      const auto dc = static_cast<std::int64_t>(fresh.compartments) - static_cast<std::int64_t>(previous_c_);
      const std::int64_t expected[] = {1, 0, -1, 1, -1};
      if (dc != expected[static_cast<std::size_t>(kind)]) {
        throw std::logic_error(std::string("compartment count changed wrongly on ") +
                               std::string(to_string(kind)));
      }
      if ((kind == ChannelKind::fragmentation || kind == ChannelKind::coagulation) &&
          fresh.species != previous_species_) {
        throw std::logic_error(std::string("species totals changed on ") + std::string(to_string(kind)));
      }
    }
    previous_valid_ = true;
    previous_c_ = fresh.compartments;
    previous_species_ = fresh.species;
  }

  const CompartmentModel& model_;
  const CompartmentRates k_;
  const std::vector<std::size_t>& active_;
  const StopCondition& stop_;
  const RunOptions& options_;
  Rng rng_;
  PopulationState state_;
  Totals totals_;
  SimulationReport report_;
  ExplosionMonitor monitor_;
  double t_ = 0.0;
  std::size_t next_grid_ = 0;
  std::vector<bool> armed_;
  std::vector<bool> inside_;
  std::vector<Row> rows_;
  std::vector<double> internal_;
  std::vector<Count> suffix_;
  std::vector<Complex> touched_;
  double coag_total_ = 0.0;
  bool previous_valid_ = false;
  Count previous_c_ = 0;
  std::vector<Count> previous_species_;

 public:
  void prime_validation() {
    previous_valid_ = true;
    previous_c_ = totals_.compartments;
    previous_species_ = totals_.species;
  }
};

}  // namespace

SimulationReport run_trajectory(const CompartmentModel& model, const PopulationState& initial,
                                const StopCondition& stop, std::uint64_t seed, const RunOptions& options) {
  Engine engine(model, initial, stop, seed, options);
  if (options.validate_events) engine.prime_validation();
  return engine.run();
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

EnsembleSummary summarize(const std::vector<SimulationReport>& reports, std::size_t dimension) {
  EnsembleSummary s;
  s.trajectories = reports.size();
  if (reports.empty()) return s;
  std::vector<double> comps, masses;
  std::vector<std::vector<double>> species(dimension);
  std::size_t explosions = 0;
  for (const auto& r : reports) {
    comps.push_back(static_cast<double>(total_compartments(r.final_state)));
    masses.push_back(static_cast<double>(population_mass(r.final_state)));
    for (std::size_t i = 0; i < dimension; ++i) {
      species[i].push_back(static_cast<double>(species_total(r.final_state, i)));
    }
    if (r.suspected_explosion) ++explosions;
  }
  s.median_final_compartments = median(comps);
  s.median_final_mass = median(masses);
  for (auto& v : species) s.median_final_species.push_back(median(v));
  s.explosion_fraction = static_cast<double>(explosions) / static_cast<double>(reports.size());

  const std::size_t hits = reports.front().hits.size();
  for (std::size_t h = 0; h < hits; ++h) {
    std::size_t visited = 0;
    double time_sum = 0.0;
    for (const auto& r : reports) {
      if (r.hits[h].visits > 0) {
        ++visited;
        time_sum += r.hits[h].first_time.value_or(0.0);
      }
    }
    s.hit_fraction.push_back(static_cast<double>(visited) / static_cast<double>(reports.size()));
    s.mean_first_hit_time.push_back(visited > 0 ? time_sum / static_cast<double>(visited)
                                                : std::numeric_limits<double>::quiet_NaN());
  }

  std::size_t points = 0;
  const SimulationReport* longest = nullptr;
  for (const auto& r : reports) {
    if (r.grid.size() >= points) {
      points = r.grid.size();
      longest = &r;
    }
  }
  for (std::size_t g = 0; g < points; ++g) {
    double c = 0.0;
    std::vector<double> sp(dimension, 0.0);
    std::size_t n = 0;
    for (const auto& r : reports) {
      if (r.grid.size() <= g) continue;
      ++n;
      c += static_cast<double>(r.grid[g].compartments);
      for (std::size_t i = 0; i < dimension; ++i) sp[i] += static_cast<double>(r.grid[g].species_totals[i]);
    }
    s.grid_times.push_back(longest->grid[g].time);
    s.mean_grid_compartments.push_back(c / static_cast<double>(n));
    for (auto& v : sp) v /= static_cast<double>(n);
    s.mean_grid_species.push_back(std::move(sp));
  }
  return s;
}

EnsembleResult run_ensemble(const CompartmentModel& model, const PopulationState& initial,
                            const StopCondition& stop, std::uint64_t master_seed, std::size_t count,
                            const RunOptions& options, unsigned threads) {
  RunOptions local = options;
  local.observer = nullptr;
  EnsembleResult result;
  result.reports.resize(count);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        result.reports[i] = run_trajectory(model, initial, stop, derive_seed(master_seed, i), local);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  result.summary = summarize(result.reports, model.dimension());
  return result;
}

}  // namespace cfrag
