#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "cfrag/errors.hpp"
#include "cfrag/kernel.hpp"
#include "cfrag/rng.hpp"
#include "oracles.hpp"

using namespace cfrag;

namespace {

// Every content vector of dimension d with total mass <= m.
std::vector<Complex> contents_up_to(std::size_t d, Count m) {
  std::vector<Complex> out;
  Complex x(d, 0);
  auto rec = [&](auto&& self, std::size_t i, Count left) -> void {
    if (i == d) {
      out.push_back(x);
      return;
    }
    for (Count v = 0; v <= left; ++v) {
      x[i] = v;
      self(self, i + 1, left - v);
    }
  };
  rec(rec, 0, m);
  return out;
}

std::map<Complex, double> as_map(const FragmentationKernel::Pmf& pmf) {
  std::map<Complex, double> m;
  for (const auto& [y, p] : pmf) m[y] += p;
  return m;
}

Complex minus(const Complex& x, const Complex& y) {
  Complex r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] - y[i];
  return r;
}

void expect_contract(const FragmentationKernel& k, const Complex& x) {
  double total = 0.0;
  std::set<Complex> seen;
  for (const auto& [y, p] : k.pmf(x)) {
    ASSERT_EQ(y.size(), x.size());
    for (std::size_t i = 0; i < x.size(); ++i) ASSERT_LE(y[i], x[i]);
    ASSERT_GT(p, 0.0);
    ASSERT_TRUE(seen.insert(y).second);
    total += p;
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
}

}  // namespace

TEST(Kernel, ContractForAllBuiltInsUpToMass12) {
  const std::vector<FragmentationKernel> kernels = {
      FragmentationKernel::binomial_half(), FragmentationKernel::uniform_unordered_pairs(),
      FragmentationKernel::enzyme_substrate(0.3, 0, 1), FragmentationKernel::enzyme_substrate(0.9, 1, 0)};
  for (std::size_t d = 1; d <= 3; ++d) {
    for (const auto& x : contents_up_to(d, 12)) {
      for (const auto& k : kernels) {
        if (k.kind() == FragmentationKernel::Kind::enzyme_substrate && d < 2) continue;
        expect_contract(k, x);
      }
    }
  }
}

TEST(Kernel, BinomialHalfExample) {
  const auto m = as_map(kernel_pmf(FragmentationKernel::binomial_half(), {2}));
  ASSERT_EQ(m.size(), 3u);
  EXPECT_DOUBLE_EQ(m.at({0}), 0.25);
  EXPECT_DOUBLE_EQ(m.at({1}), 0.5);
  EXPECT_DOUBLE_EQ(m.at({2}), 0.25);
}

TEST(Kernel, BinomialHalfProductForm) {
  for (const auto& x : contents_up_to(2, 10)) {
    const Count mass = x[0] + x[1];
    for (const auto& [y, p] : kernel_pmf(FragmentationKernel::binomial_half(), x)) {
      const double ref = std::ldexp(oracle::subset_ways(y, x), -static_cast<int>(mass));
      EXPECT_NEAR(p, ref, 1e-15);
    }
  }
}

TEST(Kernel, UniformUnorderedPairsAgainstPairEnumeration) {
  for (std::size_t d = 1; d <= 2; ++d) {
    for (const auto& x : contents_up_to(d, 10)) {
      // Distinct unordered pairs {y, x - y}.
      std::set<std::pair<Complex, Complex>> pairs;
      for (const auto& y : contents_up_to(d, 10)) {
        bool fits = true;
        for (std::size_t i = 0; i < d; ++i) fits &= y[i] <= x[i];
        if (!fits) continue;
        const Complex z = minus(x, y);
        pairs.insert(y < z ? std::pair{y, z} : std::pair{z, y});
      }
      std::map<Complex, double> ref;
      const double w = 1.0 / static_cast<double>(pairs.size());
      for (const auto& [a, b] : pairs) {
        if (a == b) {
          ref[a] += w;
        } else {
          ref[a] += w / 2;
          ref[b] += w / 2;
        }
      }
      const auto got = as_map(kernel_pmf(FragmentationKernel::uniform_unordered_pairs(), x));
      ASSERT_EQ(got.size(), ref.size());
      for (const auto& [y, p] : ref) EXPECT_NEAR(got.at(y), p, 1e-15);
    }
  }
  const auto m = as_map(kernel_pmf(FragmentationKernel::uniform_unordered_pairs(), {3}));
  for (Count y = 0; y <= 3; ++y) EXPECT_DOUBLE_EQ(m.at({y}), 0.25);
}

TEST(Kernel, EnzymeSubstrateAllEnzymesTogether) {
  for (double p : {0.1, 0.5, 0.8}) {
    const auto k = FragmentationKernel::enzyme_substrate(p, 0, 1);
    for (Count e = 2; e <= 6; ++e) {
      for (Count s = 0; s <= 20; ++s) {
        double together = 0.0;
        for (const auto& [y, q] : k.pmf({e, s})) {
          if (y[0] == 0 || y[0] == e) together += q;
        }
        EXPECT_NEAR(together, std::ldexp(1.0, 1 - static_cast<int>(e)), 1e-12) << "e=" << e << " s=" << s;
      }
    }
  }
}

TEST(Kernel, EnzymeSubstrateSingleEnzymeIsBinomial) {
  for (double p : {0.3, 0.2, 0.75}) {
    const auto k = FragmentationKernel::enzyme_substrate(p, 0, 1);
    for (Count s = 0; s <= 20; ++s) {
      const auto m = as_map(k.pmf({1, s}));
      for (Count t = 0; t <= s; ++t) {
        const auto it = m.find({1, t});
        const double got = it == m.end() ? 0.0 : it->second;
        EXPECT_NEAR(got, oracle::binomial_pdf(s, t, p), 1e-12);
      }
      for (const auto& [y, q] : m) EXPECT_EQ(y[0], 1u);
    }
  }
}

TEST(Kernel, EnzymeSubstrateWithoutEnzymeSplitsFairly) {
  const auto k = FragmentationKernel::enzyme_substrate(0.2, 0, 1);
  const auto a = as_map(k.pmf({0, 7}));
  const auto b = as_map(FragmentationKernel::binomial_half().pmf({0, 7}));
  ASSERT_EQ(a.size(), b.size());
  for (const auto& [y, p] : b) EXPECT_NEAR(a.at(y), p, 1e-15);
}

TEST(Kernel, TableValidation) {
  EXPECT_NO_THROW(FragmentationKernel::table({{{2}, {{{0}, 0.5}, {{2}, 0.5}}}}));
  EXPECT_THROW(FragmentationKernel::table({{{2}, {{{0}, 0.5}, {{3}, 0.5}}}}), ModelError);
  EXPECT_THROW(FragmentationKernel::table({{{2}, {{{0}, 0.5}, {{1}, 0.4}}}}), ModelError);
  const auto k = FragmentationKernel::table({{{2}, {{{1}, 1.0}}}});
  EXPECT_THROW(k.pmf({3}), ModelError);
  Rng rng(0);
  EXPECT_EQ(k.sample({2}, rng), (std::pair<Complex, Complex>{{1}, {1}}));
}

TEST(Kernel, SamplingConservesContentsAndMatchesPmf) {
  const std::vector<FragmentationKernel> kernels = {FragmentationKernel::binomial_half(),
                                                    FragmentationKernel::uniform_unordered_pairs(),
                                                    FragmentationKernel::enzyme_substrate(0.3, 0, 1)};
  const std::vector<Complex> parents = {{1, 5}, {2, 4}, {0, 6}, {3, 2}};
  for (const auto& k : kernels) {
    for (const auto& x : parents) {
      const auto pmf = k.pmf(x);
      std::map<Complex, std::size_t> index;
      std::vector<double> probs;
      for (const auto& [y, p] : pmf) {
        index[y] = probs.size();
        probs.push_back(p);
      }
      std::vector<std::uint64_t> counts(probs.size(), 0);
      Rng rng(17);
      for (int i = 0; i < 50000; ++i) {
        const auto [y, z] = sample_fragmentation(k, x, rng);
        for (std::size_t j = 0; j < x.size(); ++j) ASSERT_EQ(y[j] + z[j], x[j]);
        ++counts.at(index.at(y));
      }
      EXPECT_GT(oracle::chi_square_p_value(counts, probs), 0.001);
    }
  }
}

TEST(Kernel, ZeroContentAndBinomialHalfFrequency) {
  Rng rng(5);
  for (const auto& k : {FragmentationKernel::binomial_half(), FragmentationKernel::uniform_unordered_pairs()}) {
    EXPECT_EQ(sample_fragmentation(k, {0, 0}, rng), (std::pair<Complex, Complex>{{0, 0}, {0, 0}}));
  }
  int hits = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) hits += sample_fragmentation(FragmentationKernel::binomial_half(), {4}, rng).first[0] == 2;
  EXPECT_NEAR(static_cast<double>(hits) / n, 6.0 / 16.0, 0.01);
}
