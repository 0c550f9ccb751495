#include "cfrag/inflow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "cfrag/errors.hpp"

namespace cfrag {

namespace {

double content_mass(const Complex& x) {
  double m = 0.0;
  for (Count v : x) m += static_cast<double>(v);
  return m;
}

std::vector<double> cumulate(const InflowDistribution::Table& table) {
  std::vector<double> cdf;
  cdf.reserve(table.size());
  double acc = 0.0;
  for (const auto& [x, prob] : table) {
    acc += prob;
    cdf.push_back(acc);
  }
  return cdf;
}

std::size_t invert(const std::vector<double>& cdf, double u) {
  const double target = u * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
  if (it == cdf.end()) --it;
  return static_cast<std::size_t>(it - cdf.begin());
}

double poisson_log_pmf(double rate, Count k) {
  const auto kd = static_cast<double>(k);
  return kd * std::log(rate) - rate - std::lgamma(kd + 1.0);
}

}  // namespace

InflowDistribution InflowDistribution::point_mass(Complex content) {
  InflowDistribution mu;
  mu.kind_ = Kind::point_mass;
  mu.dimension_ = content.size();
  mu.mean_mass_ = content_mass(content);
  mu.support_ = {{std::move(content), 1.0}};
  mu.cumulative_ = {1.0};
  return mu;
}

InflowDistribution InflowDistribution::categorical(Table table) {
  if (table.empty()) throw ModelError("categorical inflow: empty table");
  InflowDistribution mu;
  mu.kind_ = Kind::categorical;
  mu.dimension_ = table.front().first.size();
  std::set<Complex> seen;
  double total = 0.0;
  for (const auto& [x, prob] : table) {
    if (x.size() != mu.dimension_) throw ModelError("categorical inflow: inconsistent dimensions");
    if (!(prob >= 0.0) || !std::isfinite(prob)) {
      throw ModelError("categorical inflow: probabilities must be finite and >= 0");
    }
    if (!seen.insert(x).second) throw ModelError("categorical inflow: duplicate content");
    total += prob;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ModelError("categorical inflow: probabilities sum to " + std::to_string(total) + ", not 1");
  }
  std::erase_if(table, [](const auto& e) { return e.second == 0.0; });
  std::sort(table.begin(), table.end());
  for (const auto& [x, prob] : table) mu.mean_mass_ += prob * content_mass(x);
  mu.support_ = std::move(table);
  mu.cumulative_ = cumulate(mu.support_);
  return mu;
}

InflowDistribution InflowDistribution::poisson_product(std::vector<double> rates,
                                                       double tail_bound) {
  if (rates.empty()) throw ModelError("poisson inflow: no rates");
  if (!(tail_bound > 0.0 && tail_bound < 1.0)) {
    throw ModelError("poisson inflow: tail bound must lie in (0, 1)");
  }
  InflowDistribution mu;
  mu.kind_ = Kind::poisson_product;
  mu.dimension_ = rates.size();
  mu.tail_bound_ = tail_bound;
  const double per_species = tail_bound / static_cast<double>(rates.size());

  std::vector<std::vector<double>> pmfs;
  std::vector<double> tails;
  for (double rate : rates) {
    if (!(rate >= 0.0) || !std::isfinite(rate)) {
      throw ModelError("poisson inflow: rates must be finite and >= 0");
    }
    std::vector<double> pmf;
    double kept = 0.0;
    double tail_est = 0.0;
    if (rate == 0.0) {
      pmf = {1.0};
      kept = 1.0;
    } else {
      // Extend until the unrepresented tail 1 - kept falls below the bound.
      // Past the mode the tail is also bounded by pmf(k) * rate / (k + 1 - rate),
      // which stays accurate where 1 - kept is lost to rounding.
      for (Count k = 0;; ++k) {
        const double pk = std::exp(poisson_log_pmf(rate, k));
        pmf.push_back(pk);
        kept += pk;
        const double kd = static_cast<double>(k);
        if (kd + 1.0 > rate) {
          const double next = pk * rate / (kd + 1.0);
          tail_est = next / (1.0 - rate / (kd + 2.0));
          if (tail_est < per_species && 1.0 - kept < per_species) break;
        }
        if (k > 100000000) throw ModelError("poisson inflow: rate too large to truncate");
      }
    }
    const double tail = std::max({0.0, 1.0 - kept, tail_est});
    tails.push_back(tail);
    for (double& v : pmf) v /= kept;
    mu.cut_.push_back(pmf.size() - 1);
    std::vector<double> cdf;
    double acc = 0.0;
    for (double v : pmf) cdf.push_back(acc += v);
    mu.coordinate_cdf_.push_back(std::move(cdf));
    pmfs.push_back(std::move(pmf));
  }

  double inside = 1.0;
  for (double t : tails) inside *= 1.0 - t;
  mu.tail_mass_ = 1.0 - inside;
  if (mu.tail_mass_ <= 0.0) {
    // Rounding can swallow a positive tail; keep it strictly positive so
    // that callers always account for truncation.
    mu.tail_mass_ = std::numeric_limits<double>::min();
  }
  double tail_sum = 0.0;
  for (double t : tails) tail_sum += t;
  for (std::size_t j = 0; j < rates.size(); ++j) {
    const double r = rates[j];
    if (r == 0.0) continue;
    // E[X; X > K] = r * P(X >= K) for a Poisson(r) variable.
    const double own = r * (tails[j] + std::exp(poisson_log_pmf(r, mu.cut_[j])));
    mu.tail_first_moment_ += own + r * (tail_sum - tails[j]);
  }

  std::size_t support_size = 1;
  for (const auto& pmf : pmfs) {
    support_size *= pmf.size();
    if (support_size > 4000000) throw ModelError("poisson inflow: truncated support too large");
  }
  mu.support_.reserve(support_size);
  Complex x(rates.size(), 0);
  for (std::size_t idx = 0; idx < support_size; ++idx) {
    std::size_t rem = idx;
    double prob = 1.0;
    for (std::size_t j = rates.size(); j-- > 0;) {
      x[j] = rem % pmfs[j].size();
      rem /= pmfs[j].size();
      prob *= pmfs[j][x[j]];
    }
    mu.support_.emplace_back(x, prob);
    mu.mean_mass_ += prob * content_mass(x);
  }
  mu.cumulative_ = cumulate(mu.support_);
  mu.rates_ = std::move(rates);
  return mu;
}

bool InflowDistribution::is_point_mass_at_zero() const {
  if (support_.size() != 1) return false;
  for (Count v : support_.front().first) {
    if (v != 0) return false;
  }
  return true;
}

Complex InflowDistribution::sample(Rng& rng) const {
  if (support_.empty()) throw ModelError("inflow distribution is empty");
  switch (kind_) {
    case Kind::point_mass:
      return support_.front().first;
    case Kind::categorical:
      return support_[invert(cumulative_, rng.uniform())].first;
    case Kind::poisson_product: {
      Complex x(dimension_);
      for (std::size_t j = 0; j < dimension_; ++j) {
        x[j] = invert(coordinate_cdf_[j], rng.uniform());
      }
      return x;
    }
  }
  return {};
}

Complex inflow_sample(const InflowDistribution& inflow, Rng& rng) { return inflow.sample(rng); }

}  // namespace cfrag
