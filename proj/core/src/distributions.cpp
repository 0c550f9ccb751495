#include "cfrag/distributions.hpp"

#include <cmath>

#include "cfrag/crn.hpp"

namespace cfrag {

double binomial_probability(std::uint64_t n, std::uint64_t k, double p) {
  if (k > n) return 0.0;
  if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return k == n ? 1.0 : 0.0;
  if (n <= 1000) {
    return falling_binomial(n, k) * std::pow(p, static_cast<double>(k)) *
           std::pow(1.0 - p, static_cast<double>(n - k));
  }
  const auto nd = static_cast<double>(n);
  const auto kd = static_cast<double>(k);
  return std::exp(std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0) +
                  kd * std::log(p) + (nd - kd) * std::log1p(-p));
}

std::vector<double> binomial_pmf(std::uint64_t n, double p) {
  std::vector<double> out(n + 1);
  for (std::uint64_t k = 0; k <= n; ++k) out[k] = binomial_probability(n, k, p);
  return out;
}

}  // namespace cfrag
