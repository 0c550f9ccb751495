#include "cfrag/population.hpp"

#include <string>

#include "cfrag/errors.hpp"

namespace cfrag {

PopulationState::PopulationState(std::size_t dimension,
                                 std::initializer_list<std::pair<Complex, Count>> entries)
    : dimension_(dimension) {
  for (const auto& [x, k] : entries) add(x, k);
}

void PopulationState::check_dimension(const Complex& x) const {
  if (x.size() != dimension_) {
    throw ModelError("content vector has dimension " + std::to_string(x.size()) +
                     ", population expects " + std::to_string(dimension_));
  }
}

Count PopulationState::multiplicity(const Complex& x) const {
  auto it = contents_.find(x);
  return it == contents_.end() ? 0 : it->second;
}

void PopulationState::add(const Complex& x, Count k) {
  check_dimension(x);
  if (k == 0) return;
  auto [it, inserted] = contents_.try_emplace(x, 0);
  it->second = checked_add(it->second, k);
}

void PopulationState::remove(const Complex& x, Count k) {
  if (k == 0) return;
  auto it = contents_.find(x);
  if (it == contents_.end() || it->second < k) {
    throw ModelError("remove: not enough compartments with the requested content");
  }
  it->second -= k;
  if (it->second == 0) contents_.erase(it);
}

Count total_compartments(const PopulationState& n) {
  Count c = 0;
  for (const auto& [x, k] : n) c = checked_add(c, k);
  return c;
}

Count nonempty_compartments(const PopulationState& n) {
  Count c = 0;
  for (const auto& [x, k] : n) {
    bool nonzero = false;
    for (Count v : x) nonzero = nonzero || v != 0;
    if (nonzero) c = checked_add(c, k);
  }
  return c;
}

Count species_total(const PopulationState& n, std::size_t species) {
  if (species >= n.dimension()) throw ModelError("species_total: species index out of range");
  Count s = 0;
  for (const auto& [x, k] : n) s = checked_add(s, checked_mul(x[species], k));
  return s;
}

Count species_total_where(const PopulationState& n, std::size_t species,
                          const std::function<bool(const Complex&)>& where) {
  if (species >= n.dimension()) throw ModelError("species_total: species index out of range");
  Count s = 0;
  for (const auto& [x, k] : n) {
    if (where(x)) s = checked_add(s, checked_mul(x[species], k));
  }
  return s;
}

Count substrate_without_enzyme(const PopulationState& n, std::size_t enzyme,
                               std::size_t substrate) {
  if (enzyme >= n.dimension()) throw ModelError("enzyme index out of range");
  return species_total_where(n, substrate, [enzyme](const Complex& x) { return x[enzyme] == 0; });
}

Count substrate_with_enzyme(const PopulationState& n, std::size_t enzyme,
                            std::size_t substrate) {
  if (enzyme >= n.dimension()) throw ModelError("enzyme index out of range");
  return species_total_where(n, substrate, [enzyme](const Complex& x) { return x[enzyme] != 0; });
}

Count population_mass(const PopulationState& n) {
  Count m = 0;
  for (const auto& [x, k] : n) m = checked_add(m, checked_mul(total_mass(x), k));
  return m;
}

std::string to_string(const PopulationState& n) {
  std::string out = "{";
  bool first = true;
  for (const auto& [x, k] : n) {
    if (!first) out += ", ";
    first = false;
    out += "[";
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (i > 0) out += ",";
      out += std::to_string(x[i]);
    }
    out += "]x" + std::to_string(k);
  }
  return out + "}";
}

}  // namespace cfrag
