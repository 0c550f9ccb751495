#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace cfrag {

enum class StopReason { time, budget, absorbed, bound_hit };

std::string_view to_string(StopReason reason) noexcept;

/// Watches inter-event times of a run and flags a suspected explosion.
///
/// The flag is raised iff the run ended on its event budget before its time
/// horizon and the mean inter-event time over the last `window` events is
/// smaller than the mean over the first `window` events by at least
/// `contraction`. Runs shorter than two windows are never flagged.
class ExplosionMonitor {
 public:
  static constexpr std::size_t kWindow = 1000;
  static constexpr double kContraction = 1e4;

  ExplosionMonitor() : trailing_(kWindow, 0.0) {}

  void record(double dt);

  /// Ratio initial-window mean / trailing-window mean, or 0 when fewer than
  /// two full windows were recorded.
  double contraction() const;

  bool suspected(bool budget_exhausted_before_horizon) const {
    return budget_exhausted_before_horizon && contraction() >= kContraction;
  }

 private:
  std::uint64_t count_ = 0;
  double initial_sum_ = 0.0;
  std::vector<double> trailing_;
};

}  // namespace cfrag
