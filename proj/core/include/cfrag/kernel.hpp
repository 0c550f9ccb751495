#pragma once

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "cfrag/crn.hpp"
#include "cfrag/rng.hpp"

namespace cfrag {

/// Law psi(x, .) of one daughter's content when a compartment with content x
/// splits; the other daughter receives x - y.
///
/// Built-in kinds:
///  - binomial_half: every molecule picks a daughter by a fair coin,
///    psi(x, y) = 2^-|x| prod_i C(x_i, y_i).
///  - uniform_unordered_pairs: uniform over unordered splits {y, x - y}; each
///    pair's weight is shared evenly between its two labelings.
///  - enzyme_substrate(p): with e enzymes and s substrates,
///      e = 0:  substrates split by fair coins;
///      e = 1:  the enzyme goes to daughter 1 and each substrate follows it
///              with probability p;
///      e >= 2: enzymes and substrates all split by fair coins, so every
///              enzyme ends up in one daughter with probability 2^(1-e).
///    Other species split by fair coins.
///  - table: an explicit pmf per parent content.
class FragmentationKernel {
 public:
  enum class Kind { binomial_half, uniform_unordered_pairs, enzyme_substrate, table };

  using Pmf = std::vector<std::pair<Complex, double>>;
  using TableEntries = std::map<Complex, Pmf>;

  FragmentationKernel() = default;

  static FragmentationKernel binomial_half();
  static FragmentationKernel uniform_unordered_pairs();
  static FragmentationKernel enzyme_substrate(double p, std::size_t enzyme, std::size_t substrate);
  /// Validates support and normalization (1e-12) of every row.
  static FragmentationKernel table(TableEntries entries);

  Kind kind() const noexcept { return kind_; }
  double p() const noexcept { return p_; }
  std::size_t enzyme() const noexcept { return enzyme_; }
  std::size_t substrate() const noexcept { return substrate_; }
  const TableEntries& table_entries() const noexcept { return table_; }

  /// Explicit pmf over y (positive entries only, lexicographic order).
  /// Throws ModelError for a table kernel without a row for x.
  Pmf pmf(const Complex& x) const;

  /// Draws (y, x - y).
  std::pair<Complex, Complex> sample(const Complex& x, Rng& rng) const;

 private:
  Kind kind_ = Kind::binomial_half;
  double p_ = 0.5;
  std::size_t enzyme_ = 0;
  std::size_t substrate_ = 0;
  TableEntries table_;
};

FragmentationKernel::Pmf kernel_pmf(const FragmentationKernel& kernel, const Complex& x);

std::pair<Complex, Complex> sample_fragmentation(const FragmentationKernel& kernel,
                                                 const Complex& x, Rng& rng);

}  // namespace cfrag
