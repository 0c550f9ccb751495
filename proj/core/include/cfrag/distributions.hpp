#pragma once

#include <cstdint>
#include <vector>

namespace cfrag {

/// Probabilities P(Y = k), k = 0..n, for Y ~ Binomial(n, p).
///
/// Up to n = 1000 each entry is C(n, k) p^k (1-p)^(n-k) with the binomial
/// coefficient from falling_binomial; beyond that the log-gamma form is used.
std::vector<double> binomial_pmf(std::uint64_t n, double p);

/// Single Binomial(n, p) probability, same evaluation rules.
double binomial_probability(std::uint64_t n, std::uint64_t k, double p);

}  // namespace cfrag
