#include "cfrag/run_control.hpp"

#include <limits>
#include <numeric>

namespace cfrag {

std::string_view to_string(StopReason reason) noexcept {
  switch (reason) {
    case StopReason::time: return "time";
    case StopReason::budget: return "budget";
    case StopReason::absorbed: return "absorbed";
    case StopReason::bound_hit: return "bound_hit";
  }
  return "unknown";
}

void ExplosionMonitor::record(double dt) {
  if (count_ < kWindow) initial_sum_ += dt;
  trailing_[count_ % kWindow] = dt;
  ++count_;
}

double ExplosionMonitor::contraction() const {
  if (count_ < 2 * kWindow) return 0.0;
  // Summed fresh: the window spans many orders of magnitude and a running
  // add/subtract total would lose the small tail.
  const double trailing = std::accumulate(trailing_.begin(), trailing_.end(), 0.0);
  if (trailing <= 0.0) {
    return initial_sum_ > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return initial_sum_ / trailing;
}

}  // namespace cfrag
