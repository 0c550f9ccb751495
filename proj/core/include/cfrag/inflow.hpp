#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "cfrag/crn.hpp"
#include "cfrag/rng.hpp"

namespace cfrag {

/// Content distribution of compartments created by inflow.
///
/// The represented support is finite. Infinite-support Poisson products are
/// truncated per species where the remaining tail mass drops below the
/// requested bound, then renormalized; the discarded mass and a bound on its
/// first moment are kept so generator evaluations can bound their error.
class InflowDistribution {
 public:
  enum class Kind { point_mass, categorical, poisson_product };

  using Table = std::vector<std::pair<Complex, double>>;

  InflowDistribution() = default;

  static InflowDistribution point_mass(Complex content);
  static InflowDistribution categorical(Table table);
  static InflowDistribution poisson_product(std::vector<double> rates, double tail_bound = 1e-12);

  Kind kind() const noexcept { return kind_; }
  std::size_t dimension() const noexcept { return dimension_; }

  /// Represented support in lexicographic order, probabilities summing to 1.
  const Table& support() const noexcept { return support_; }

  /// Mean total molecule count of a new compartment over the represented
  /// support.
  double mean_mass() const noexcept { return mean_mass_; }

  /// Probability discarded by truncation (0 for finite kinds).
  double tail_mass() const noexcept { return tail_mass_; }

  /// Upper bound on E[|X| ; X outside the represented support].
  double tail_first_moment() const noexcept { return tail_first_moment_; }

  bool truncated() const noexcept { return tail_mass_ > 0.0; }
  bool is_point_mass_at_zero() const;

  const std::vector<double>& poisson_rates() const noexcept { return rates_; }
  double tail_bound() const noexcept { return tail_bound_; }
  /// Largest count kept for each species of a Poisson product.
  const std::vector<Count>& truncation_points() const noexcept { return cut_; }

  Complex sample(Rng& rng) const;

 private:
  Kind kind_ = Kind::point_mass;
  std::size_t dimension_ = 0;
  Table support_;
  std::vector<double> cumulative_;
  double mean_mass_ = 0.0;
  double tail_mass_ = 0.0;
  double tail_first_moment_ = 0.0;

  // Poisson product only.
  std::vector<double> rates_;
  double tail_bound_ = 0.0;
  std::vector<Count> cut_;
  std::vector<std::vector<double>> coordinate_cdf_;
};

Complex inflow_sample(const InflowDistribution& inflow, Rng& rng);

}  // namespace cfrag
