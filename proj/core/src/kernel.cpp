#include "cfrag/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cfrag/distributions.hpp"
#include "cfrag/errors.hpp"

namespace cfrag {

namespace {

using CoordinatePmf = std::vector<std::pair<Count, double>>;

CoordinatePmf point(Count v) { return {{v, 1.0}}; }

CoordinatePmf binomial_coordinate(Count n, double p) {
  CoordinatePmf out;
  const auto pmf = binomial_pmf(n, p);
  for (Count k = 0; k <= n; ++k) {
    if (pmf[k] > 0.0) out.emplace_back(k, pmf[k]);
  }
  return out;
}

// Cartesian product of independent coordinate laws, lexicographic in y.
FragmentationKernel::Pmf product(const std::vector<CoordinatePmf>& coords) {
  FragmentationKernel::Pmf out;
  Complex y(coords.size());
  auto rec = [&](auto&& self, std::size_t i, double prob) -> void {
    if (i == coords.size()) {
      out.emplace_back(y, prob);
      return;
    }
    for (const auto& [v, q] : coords[i]) {
      y[i] = v;
      self(self, i + 1, prob * q);
    }
  };
  rec(rec, 0, 1.0);
  return out;
}

Count split_count(const Complex& x) {
  Count m = 1;
  for (Count v : x) m = checked_mul(m, checked_add(v, 1));
  return m;
}

bool all_even(const Complex& x) {
  return std::all_of(x.begin(), x.end(), [](Count v) { return v % 2 == 0; });
}

Complex decode_split(const Complex& x, Count index) {
  Complex y(x.size());
  for (std::size_t i = x.size(); i-- > 0;) {
    y[i] = index % (x[i] + 1);
    index /= x[i] + 1;
  }
  return y;
}

Complex complement(const Complex& x, const Complex& y) {
  Complex r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] - y[i];
  return r;
}

}  // namespace

FragmentationKernel FragmentationKernel::binomial_half() { return FragmentationKernel{}; }

FragmentationKernel FragmentationKernel::uniform_unordered_pairs() {
  FragmentationKernel k;
  k.kind_ = Kind::uniform_unordered_pairs;
  return k;
}

FragmentationKernel FragmentationKernel::enzyme_substrate(double p, std::size_t enzyme,
                                                          std::size_t substrate) {
  if (!(p > 0.0 && p < 1.0)) throw ModelError("enzyme_substrate kernel: p must lie in (0, 1)");
  if (enzyme == substrate) throw ModelError("enzyme_substrate kernel: enzyme and substrate must differ");
  FragmentationKernel k;
  k.kind_ = Kind::enzyme_substrate;
  k.p_ = p;
  k.enzyme_ = enzyme;
  k.substrate_ = substrate;
  return k;
}

FragmentationKernel FragmentationKernel::table(TableEntries entries) {
  for (auto& [x, pmf] : entries) {
    double total = 0.0;
    for (const auto& [y, prob] : pmf) {
      if (y.size() != x.size()) throw ModelError("table kernel: daughter dimension mismatch");
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (y[i] > x[i]) throw ModelError("table kernel: daughter exceeds parent content");
      }
      if (!(prob >= 0.0)) throw ModelError("table kernel: negative probability");
      total += prob;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ModelError("table kernel: row does not sum to 1");
    std::erase_if(pmf, [](const auto& e) { return e.second == 0.0; });
    std::sort(pmf.begin(), pmf.end());
  }
  FragmentationKernel k;
  k.kind_ = Kind::table;
  k.table_ = std::move(entries);
  return k;
}

FragmentationKernel::Pmf FragmentationKernel::pmf(const Complex& x) const {
  switch (kind_) {
    case Kind::binomial_half: {
      std::vector<CoordinatePmf> coords;
      for (Count v : x) coords.push_back(binomial_coordinate(v, 0.5));
      return product(coords);
    }
    case Kind::uniform_unordered_pairs: {
      const Count labeled = split_count(x);
      const bool self_paired = all_even(x);
      const double pairs = (static_cast<double>(labeled) + (self_paired ? 1.0 : 0.0)) / 2.0;
      Pmf out;
      out.reserve(labeled);
      for (Count i = 0; i < labeled; ++i) {
        Complex y = decode_split(x, i);
        const bool self = y == complement(x, y);
        out.emplace_back(std::move(y), (self ? 1.0 : 0.5) / pairs);
      }
      return out;
    }
    case Kind::enzyme_substrate: {
      if (enzyme_ >= x.size() || substrate_ >= x.size()) {
        throw ModelError("enzyme_substrate kernel: species index out of range");
      }
      std::vector<CoordinatePmf> coords;
      const Count e = x[enzyme_];
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (i == enzyme_) {
          coords.push_back(e <= 1 ? point(e) : binomial_coordinate(e, 0.5));
        } else if (i == substrate_) {
          coords.push_back(binomial_coordinate(x[i], e == 1 ? p_ : 0.5));
        } else {
          coords.push_back(binomial_coordinate(x[i], 0.5));
        }
      }
      return product(coords);
    }
    case Kind::table: {
      auto it = table_.find(x);
      if (it == table_.end()) throw ModelError("table kernel: no row for the requested parent content");
      return it->second;
    }
  }
  return {};
}

std::pair<Complex, Complex> FragmentationKernel::sample(const Complex& x, Rng& rng) const {
  Complex y(x.size(), 0);
  switch (kind_) {
    case Kind::binomial_half:
      for (std::size_t i = 0; i < x.size(); ++i) y[i] = rng.binomial(x[i], 0.5);
      break;
    case Kind::uniform_unordered_pairs: {
      // Labeled splits are equally likely, except that a self-paired split
      // {x/2, x/2} carries the weight of two labelings.
      const Count labeled = split_count(x);
      if (all_even(x)) {
        const Count k = rng.below(checked_add(labeled, 1));
        if (k == labeled) {
          for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] / 2;
        } else {
          y = decode_split(x, k);
        }
      } else {
        y = decode_split(x, rng.below(labeled));
      }
      break;
    }
    case Kind::enzyme_substrate: {
      if (enzyme_ >= x.size() || substrate_ >= x.size()) {
        throw ModelError("enzyme_substrate kernel: species index out of range");
      }
      const Count e = x[enzyme_];
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (i == enzyme_) {
          y[i] = e <= 1 ? e : rng.binomial(e, 0.5);
        } else if (i == substrate_) {
          y[i] = rng.binomial(x[i], e == 1 ? p_ : 0.5);
        } else {
          y[i] = rng.binomial(x[i], 0.5);
        }
      }
      break;
    }
    case Kind::table: {
      const auto& rows = pmf(x);
      const double u = rng.uniform();
      double acc = 0.0;
      y = rows.back().first;
      for (const auto& [candidate, prob] : rows) {
        acc += prob;
        if (u < acc) {
          y = candidate;
          break;
        }
      }
      break;
    }
  }
  Complex rest = complement(x, y);
  return {std::move(y), std::move(rest)};
}

FragmentationKernel::Pmf kernel_pmf(const FragmentationKernel& kernel, const Complex& x) {
  return kernel.pmf(x);
}

std::pair<Complex, Complex> sample_fragmentation(const FragmentationKernel& kernel,
                                                 const Complex& x, Rng& rng) {
  return kernel.sample(x, rng);
}

}  // namespace cfrag
