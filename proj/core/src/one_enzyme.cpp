#include "cfrag/one_enzyme.hpp"

#include <cmath>
#include <limits>

#include "cfrag/errors.hpp"
#include "cfrag/rng.hpp"

namespace cfrag {

OneEnzymeReport run_one_enzyme_chain(double alpha, double p, Count initial_substrate,
                                     const OneEnzymeStop& stop, std::uint64_t seed,
                                     Count return_threshold) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ModelError("alpha must be finite and >= 0");
  if (!(p > 0.0 && p < 1.0)) throw ModelError("p must lie in (0, 1)");
  if (!stop.t_max && !stop.event_budget) throw ModelError("stop condition needs t_max or event_budget");

  OneEnzymeReport report;
  report.seed = seed;
  report.return_threshold = return_threshold;
  Rng rng(seed);
  ExplosionMonitor monitor;
  Count x = initial_substrate;
  report.max_substrate = x;
  const double horizon = stop.t_max.value_or(std::numeric_limits<double>::infinity());
  double t = 0.0;

  while (true) {
    if (stop.event_budget && report.event_count >= *stop.event_budget) {
      report.stop_reason = StopReason::budget;
      break;
    }
    const auto xd = static_cast<double>(x);
    const double up = alpha * xd * (xd - 1.0) + 1.0;
    const double total = up + xd;
    const double dt = rng.exponential(total);
    if (t + dt > horizon) {
      t = horizon;
      report.stop_reason = StopReason::time;
      break;
    }
    const Count before = x;
    if (rng.uniform() * total < up) {
      if (x == std::numeric_limits<Count>::max()) {
        report.overflow = true;
        report.stop_reason = StopReason::budget;
        break;
      }
      ++x;
      ++report.growth_events;
    } else {
      x = rng.binomial(x, p);
      ++report.fragmentation_events;
    }
    t += dt;
    monitor.record(dt);
    ++report.event_count;
    if (x > report.max_substrate) report.max_substrate = x;
    if (before >= return_threshold && x < return_threshold) ++report.returns_below;
  }

  report.final_substrate = x;
  report.final_time = t;
  report.suspected_explosion = monitor.suspected(report.stop_reason == StopReason::budget && t < horizon);
  return report;
}

}  // namespace cfrag
