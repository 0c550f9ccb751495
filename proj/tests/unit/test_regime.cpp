#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "cfrag/errors.hpp"
#include "cfrag/regime.hpp"
#include "cfrag/rng.hpp"

using namespace cfrag;

namespace {

bool has_tag(const Classification& c, const std::string& tag) {
  return std::find(c.tags.begin(), c.tags.end(), tag) != c.tags.end();
}

// Expected condition from the raw inequalities, in classifier order.
std::string expected_condition(const Model4Params& p) {
  const double e = p.kappa_E, d = p.kappa_d;
  if (p.kappa_C > 0 && e > 0) return "a";
  if (p.kappa_C > 0 && d > 0 && e == 0) return "c";
  if (e * e + e * d > p.kappa_b * p.kappa_F) return "b";
  if (p.kappa_C == 0 && p.kappa_I > 0 && (p.kappa_F - e) * p.kappa_b > (e + d) * e) return "transient";
  if (p.kappa_C > 0 && d == 0 && e == 0) return "degenerate";
  return "gap";
}

double pick(Rng& rng) {
  // Mix of zeros, small integers and continuous values.
  switch (rng.below(4)) {
    case 0: return 0.0;
    case 1: return static_cast<double>(1 + rng.below(3));
    default: return rng.uniform() * 3.0;
  }
}

}  // namespace

TEST(Classify, AllOnesIsConditionA) {
  const auto c = classify_regime({1, 1, 1, 1, 1, 1, 0}, true);
  EXPECT_TRUE(c.non_explosive);
  EXPECT_EQ(c.regime, Regime::positive_recurrent);
  EXPECT_EQ(c.condition, "a");
  ASSERT_TRUE(c.certificate);
  EXPECT_DOUBLE_EQ(c.certificate->alpha, 1.0);
  EXPECT_FALSE(c.subcases.empty());
}

TEST(Classify, ThresholdScanPoints) {
  Model4Params p{1, 1, 1, 1, 1.9, 0, 0};
  auto c = classify_regime(p, true);
  EXPECT_EQ(c.regime, Regime::positive_recurrent);
  EXPECT_EQ(c.condition, "b");
  ASSERT_TRUE(c.alpha_interval);
  EXPECT_GT(c.certificate->alpha, c.alpha_interval->first);
  EXPECT_LT(c.certificate->alpha, c.alpha_interval->second);

  p.kappa_F = 2.1;
  c = classify_regime(p, true);
  EXPECT_EQ(c.regime, Regime::unknown_gap);
  EXPECT_TRUE(has_tag(c, "conjectured_transient"));

  p.kappa_F = 2.0;
  c = classify_regime(p, true);
  EXPECT_EQ(c.regime, Regime::unknown_gap);
  EXPECT_TRUE(has_tag(c, "boundary"));
}

TEST(Classify, TransientExample) {
  const auto c = classify_regime({2, 0, 1, 1, 2, 0, 0}, true);
  EXPECT_EQ(c.regime, Regime::transient);
  ASSERT_TRUE(c.alpha_interval);
  EXPECT_DOUBLE_EQ(c.alpha_interval->first, 0.5);
  EXPECT_DOUBLE_EQ(c.alpha_interval->second, 1.0);
  EXPECT_DOUBLE_EQ(c.certificate->alpha, 0.75);
  ASSERT_TRUE(c.certificate->epsilon && c.certificate->k_epsilon);
  EXPECT_GT(*c.certificate->epsilon, 0.0);
}

TEST(Classify, NoInflowMentionsAbsorption) {
  const auto c = classify_regime({1, 1, 0, 1, 1, 1, 0}, true);
  EXPECT_EQ(c.condition, "a");
  const bool mentions = std::any_of(c.subcases.begin(), c.subcases.end(), [](const std::string& s) {
    return s.find("absorbed by the state with zero compartments") != std::string::npos;
  });
  EXPECT_TRUE(mentions);
}

TEST(Classify, ConditionCAndDegenerate) {
  EXPECT_EQ(classify_regime({1, 1, 1, 0, 1, 1, 0}, true).condition, "c");
  const auto d = classify_regime({1, 0, 1, 0, 1, 1, 0}, true);
  EXPECT_EQ(d.regime, Regime::degenerate);
  EXPECT_TRUE(d.non_explosive);
}

TEST(Classify, InvalidParameters) {
  EXPECT_THROW(classify_regime({1, 1, 1, 1, 1, 1, std::numeric_limits<double>::infinity()}, false), ModelError);
  EXPECT_THROW(classify_regime({-1, 1, 1, 1, 1, 1, 0}, true), ModelError);
}

TEST(Classify, AgreesWithInequalitiesOnRandomParameters) {
  Rng rng(5);
  for (int i = 0; i < 5000; ++i) {
    const Model4Params p{pick(rng), pick(rng), pick(rng), pick(rng), pick(rng), pick(rng), rng.uniform() * 4};
    const auto c = classify_regime(p, rng.bernoulli(0.5));
    EXPECT_EQ(c.condition, expected_condition(p));
    EXPECT_TRUE(c.non_explosive);
    if (c.regime == Regime::positive_recurrent || c.regime == Regime::transient) {
      ASSERT_TRUE(c.certificate);
      ASSERT_TRUE(c.alpha_interval);
      EXPECT_GT(c.certificate->alpha, c.alpha_interval->first);
      EXPECT_LT(c.certificate->alpha, c.alpha_interval->second);
    }
  }
}

TEST(Certificate, PassesOnRandomPositiveRecurrentModels) {
  Rng rng(6);
  int checked = 0;
  while (checked < 15) {
    const Model4Params p{pick(rng), pick(rng), pick(rng), pick(rng), pick(rng), pick(rng), 0};
    const auto m = make_model4(p, InflowDistribution::point_mass({0}), FragmentationKernel::binomial_half());
    const auto c = classify_regime(m);
    if (c.regime != Regime::positive_recurrent) continue;
    RegionSpec region;
    region.c_max = 6;
    region.mass_max = 12;
    region.samples = 100;
    const auto r = check_certificate(m, c, region);
    EXPECT_TRUE(r.passed()) << c.condition << " violations " << r.violation_count;
    EXPECT_GT(r.states_in_scope, 0u);
    ++checked;
  }
}

TEST(Certificate, NoneForGap) {
  const auto c = classify_regime({1, 1, 1, 1, 2.1, 0, 0}, true);
  EXPECT_THROW(certificate_check({1, 1, 1, 1, 2.1, 0, 0}, c), ModelError);
}
