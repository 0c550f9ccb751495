#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <map>
#include <string>
#include <utility>

#include "cfrag/crn.hpp"

namespace cfrag {

/// Coarse-grained population: number of compartments per content vector.
///
/// Canonical form: no content maps to zero, every key has the same
/// dimension, and iteration runs over contents in lexicographic order.
class PopulationState {
 public:
  using Map = std::map<Complex, Count>;

  PopulationState() = default;
  explicit PopulationState(std::size_t dimension) : dimension_(dimension) {}
  PopulationState(std::size_t dimension,
                  std::initializer_list<std::pair<Complex, Count>> entries);

  std::size_t dimension() const noexcept { return dimension_; }
  bool empty() const noexcept { return contents_.empty(); }
  std::size_t distinct_contents() const noexcept { return contents_.size(); }

  Count multiplicity(const Complex& x) const;
  void add(const Complex& x, Count k = 1);
  /// Throws ModelError if fewer than k compartments hold x.
  void remove(const Complex& x, Count k = 1);

  const Map& contents() const noexcept { return contents_; }
  Map::const_iterator begin() const noexcept { return contents_.begin(); }
  Map::const_iterator end() const noexcept { return contents_.end(); }

  friend bool operator==(const PopulationState& a, const PopulationState& b) {
    return a.dimension_ == b.dimension_ && a.contents_ == b.contents_;
  }
  friend bool operator<(const PopulationState& a, const PopulationState& b) {
    return a.contents_ < b.contents_;
  }

 private:
  void check_dimension(const Complex& x) const;

  std::size_t dimension_ = 0;
  Map contents_;
};

/// C(n): number of compartments.
Count total_compartments(const PopulationState& n);

/// Number of compartments with non-zero content.
Count nonempty_compartments(const PopulationState& n);

/// sum_x x_species * n_x.
Count species_total(const PopulationState& n, std::size_t species);

/// Same sum restricted to contents satisfying `where`.
Count species_total_where(const PopulationState& n, std::size_t species,
                          const std::function<bool(const Complex&)>& where);

/// Substrate molecules sitting in compartments without enzyme.
Count substrate_without_enzyme(const PopulationState& n, std::size_t enzyme,
                               std::size_t substrate);

/// Substrate molecules sharing a compartment with at least one enzyme.
Count substrate_with_enzyme(const PopulationState& n, std::size_t enzyme,
                            std::size_t substrate);

/// Total molecules of every species in every compartment.
Count population_mass(const PopulationState& n);

/// "{[0]x2, [3]x1}": content vectors with multiplicities, lexicographic.
std::string to_string(const PopulationState& n);

}  // namespace cfrag
