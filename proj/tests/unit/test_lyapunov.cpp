#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "cfrag/errors.hpp"
#include "cfrag/lyapunov.hpp"
#include "cfrag/regime.hpp"
#include "cfrag/rng.hpp"
#include "oracles.hpp"

using namespace cfrag;

namespace {

Model4Params ones() { return {1, 1, 1, 1, 1, 1, 0}; }

CompartmentModel point_model(const Model4Params& p) {
  return make_model4(p, InflowDistribution::point_mass({0}), FragmentationKernel::binomial_half());
}

// Af(x) for the one-enzyme substrate chain by listing every neighbor.
double chain_drift(double alpha, double p, const std::function<double(Count)>& f, Count x) {
  const double xd = static_cast<double>(x);
  double total = (alpha * xd * (xd - 1.0) + 1.0) * (f(x + 1) - f(x));
  for (Count y = 0; y <= x; ++y) total += xd * oracle::binomial_pdf(x, y, p) * (f(y) - f(x));
  return total;
}

}  // namespace

TEST(Candidate, Evaluations) {
  const PopulationState n(2, {{{1, 4}, 1}, {{0, 2}, 3}, {{0, 0}, 1}});
  EXPECT_DOUBLE_EQ(CandidateFunction::population_weighted(2.0, {1.0, 0.5})(n), 5.0 + 2.0 * (3.0 + 3.0));
  const double w = 5.0 + 0.5 * 4.0;
  EXPECT_DOUBLE_EQ(CandidateFunction::transience_witness(0.5)(n), 1.0 - 1.0 / (w + 1.0));
  EXPECT_DOUBLE_EQ(CandidateFunction::composite_step3(0.5, 0, 1)(n), 2.0 + std::log(6.0 + 5.0));
  EXPECT_DOUBLE_EQ(CandidateFunction::composite_step3(0.5, 0, 1)(PopulationState(2)), 0.0);
  EXPECT_DOUBLE_EQ(CandidateFunction::power(0.5).scalar(9), 3.0);
  EXPECT_DOUBLE_EQ(CandidateFunction::recip_log().scalar(0), 1.0 / std::log(2.0));
  EXPECT_DOUBLE_EQ(CandidateFunction::log_shift()(CrnState{2, 3}), 2.0 + std::log(4.0));
  EXPECT_DOUBLE_EQ(CandidateFunction::linear_crn({1.0, 2.0})(CrnState{2, 3}), 8.0);
  EXPECT_THROW(CandidateFunction::linear_crn({1.0})(n), ModelError);
  EXPECT_THROW(CandidateFunction::transience_witness(1.0)(CrnState{1}), ModelError);
  EXPECT_THROW(CandidateFunction::linear_crn({1.0, 0.0}), ModelError);
  EXPECT_THROW(CandidateFunction::power(1.5), ModelError);
  EXPECT_DOUBLE_EQ(CandidateFunction::constant(4.0)(n), 4.0);
}

TEST(ClosedForm, Examples) {
  Model4Params p = ones();
  p.lambda = 3.0;
  EXPECT_DOUBLE_EQ(closed_form_drift_model4(p, 2.0, PopulationState(1)), 1.0 + 3.0 * 2.0);
  EXPECT_DOUBLE_EQ(closed_form_drift_model4(ones(), 2.0, PopulationState(1, {{{2}, 3}})), -17.0);
  const Model4Params grow{1.5, 0, 2, 0, 1.2, 0, 0.5};
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const auto n = oracle::random_state(1, 8, 6, rng);
    EXPECT_GT(closed_form_drift_model4(grow, 0.7, n), 0.0);
  }
}

TEST(ClosedForm, MatchesGenerator) {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    Model4Params p{rng.uniform() * 3, rng.uniform() * 3, rng.uniform() * 3, rng.uniform() * 3,
                   rng.uniform() * 3, rng.uniform() * 3, 0};
    const double alpha = 0.1 + rng.uniform() * 3;
    const int kind = trial % 3;
    const InflowDistribution mu = kind == 0   ? InflowDistribution::point_mass({0})
                                  : kind == 1 ? InflowDistribution::categorical({{{1}, 0.3}, {{4}, 0.7}})
                                              : InflowDistribution::poisson_product({2.5});
    const auto m = make_model4(p, mu, FragmentationKernel::binomial_half());
    p = model4_params(m);
    const auto V = CandidateFunction::population_weighted(alpha, {1.0});
    for (int i = 0; i < 20; ++i) {
      const auto n = sample_population_state(1, 0, 8, 16, rng);
      const auto g = apply_population_generator(m, V.as_population_function(), n, V.increment_bound());
      const double ref = closed_form_drift_model4(p, alpha, n);
      EXPECT_NEAR(g.value, ref, 1e-9 * (1.0 + std::abs(ref)) + g.truncation_error) << to_string(n);
    }
  }
}

TEST(ClosedForm, RejectsOtherChemistry) {
  const CompartmentModel m(ReactionNetwork({"S"}, {{{2}, {0}, 1.0}}), {1, 1, 1, 1}, 0,
                           InflowDistribution::point_mass({0}), FragmentationKernel::binomial_half());
  EXPECT_THROW(model4_params(m), ModelError);
}

TEST(OneEnzymeDrift, MatchesNeighborEnumeration) {
  const std::vector<std::pair<double, double>> params = {{1.0, 0.5}, {1.0, 0.2}, {0.3, 0.9}, {2.0, 0.05}};
  const std::vector<CandidateFunction> fs = {CandidateFunction::recip_log(), CandidateFunction::power(0.5),
                                             CandidateFunction::power(0.1)};
  for (const auto& [alpha, p] : params) {
    for (const auto& f : fs) {
      const std::function<double(Count)> g = [&](Count x) { return f.scalar(x); };
      for (Count x = 0; x <= 200; ++x) {
        const double ref = chain_drift(alpha, p, g, x);
        ASSERT_NEAR(one_enzyme_drift(alpha, p, f, x), ref, 1e-12 * (1.0 + std::abs(ref)))
            << f.describe() << " alpha=" << alpha << " p=" << p << " x=" << x;
      }
    }
  }
  const auto f = CandidateFunction::recip_log();
  EXPECT_DOUBLE_EQ(one_enzyme_drift(1.0, 0.5, f, 0), f.scalar(1) - f.scalar(0));
}

TEST(OneEnzymeDrift, PowerStepBound) {
  // A g(x) <= x^{1+l}(alpha l + p^l - 1) + l x^{l-1} for g = x^l, x >= 1.
  const double alpha = 1.0, p = 0.2, l = 0.5;
  const auto g = CandidateFunction::power(l);
  const double lead = alpha * l + std::pow(p, l) - 1.0;
  EXPECT_NEAR(lead, -0.0528, 1e-4);
  for (Count x = 1; x <= 10000; ++x) {
    const double xd = static_cast<double>(x);
    ASSERT_LE(one_enzyme_drift(alpha, p, g, x), std::pow(xd, 1 + l) * lead + l * std::pow(xd, l - 1) + 1e-9) << x;
  }
  const auto scan = scan_one_enzyme_drift(alpha, p, g, 20000);
  ASSERT_TRUE(scan.x_star.has_value());
  EXPECT_LE(scan.max_drift_beyond_x_star, -1.0);
}

TEST(ChooseLambda, Cases) {
  const auto l = choose_lambda(1.0, 0.2);
  ASSERT_TRUE(l.has_value());
  EXPECT_LT(1.0 * *l + std::pow(0.2, *l) - 1.0, 0.0);
  EXPECT_LT(1.0 * 0.5 + std::pow(0.2, 0.5) - 1.0, 0.0);
  EXPECT_FALSE(choose_lambda(1.0, 0.6).has_value());
  EXPECT_TRUE(choose_lambda(1e-6, 0.5).has_value());
  EXPECT_THROW(choose_lambda(1.0, 1.0), ModelError);
}

TEST(ChooseLambda, ReturnedValueAlwaysAdmissible) {
  Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    const double alpha = 0.01 + rng.uniform() * 3;
    const double p = 0.001 + rng.uniform() * 0.998;
    const auto l = choose_lambda(alpha, p);
    if (l) {
      EXPECT_GT(*l, 0.0);
      EXPECT_LT(*l, 1.0);
      EXPECT_LT(alpha * *l + std::pow(p, *l) - 1.0, 0.0);
    } else {
      // Only near or above the threshold.
      EXPECT_GT(p, std::exp(-alpha) * 0.99) << alpha << " " << p;
    }
  }
}

TEST(LinearBound, BirthDeathHasNoViolations) {
  const ReactionNetwork bd({"S"}, {{{0}, {1}, 2.5}, {{1}, {0}, 0.75}});
  const auto r = check_crn_linear_bound(bd, {1.0}, 0.0, 2.5, 1'000'000);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.states_checked, 1'000'001u);
  EXPECT_NEAR(r.max_drift, 2.5, 1e-12);
}

TEST(LinearBound, NoReactionsNoViolations) {
  const ReactionNetwork none({"A", "B"}, {});
  EXPECT_TRUE(check_crn_linear_bound(none, {1.0, 3.0}, 0.0, 0.0, 50).passed());
}

TEST(LinearBound, EnzymeGrowthFailsOnDiagonal) {
  const ReactionNetwork net({"E", "S"}, {{{1, 0}, {2, 0}, 1.0}, {{1, 1}, {1, 2}, 1.0}});
  const auto r = check_crn_linear_bound(net, {1.0, 1.0}, 1.0, 1.0, 200);
  EXPECT_FALSE(r.passed());
  const auto s = first_diagonal_violation(net, {1.0, 1.0}, 1.0, 1.0, 200);
  ASSERT_TRUE(s.has_value());
  EXPECT_EQ(*s, 2u);
}

TEST(LinearBound, EveryLinearCandidateFailsOnTheDiagonal) {
  // A f(s, s) - c f(s, s) - d = w2 s^2 + w1 s - c (w1 + w2) s - d.
  const ReactionNetwork net({"E", "S"}, {{{1, 0}, {2, 0}, 1.0}, {{1, 1}, {1, 2}, 1.0}});
  for (double w1 : {0.01, 0.5, 1.0, 7.0, 100.0}) {
    for (double w2 : {0.01, 0.5, 1.0, 7.0, 100.0}) {
      for (double c : {0.0, 1.0, 3.0, 10.0}) {
        for (double d : {0.0, 1.0, 100.0, 1000.0}) {
          const auto s = first_diagonal_violation(net, {w1, w2}, c, d, 1'000'000);
          ASSERT_TRUE(s.has_value()) << w1 << " " << w2 << " " << c << " " << d;
          Count expected = 0;
          for (;; ++expected) {
            const double x = static_cast<double>(expected);
            const double excess = w2 * x * x + w1 * x - c * (w1 + w2) * x - d;
            if (excess > 1e-9 * (1.0 + std::abs(c * (w1 + w2) * x + d))) break;
          }
          EXPECT_EQ(*s, expected);
        }
      }
    }
  }
}

TEST(Enumeration, OneSpeciesCountsMatchMultisets) {
  // Multisets of at most c_max contents from {0..m} with total <= m.
  for (Count c_max = 0; c_max <= 4; ++c_max) {
    for (Count m = 0; m <= 6; ++m) {
      std::set<std::vector<Count>> ref;
      std::vector<Count> pick;
      auto rec = [&](auto&& self, Count from, Count left) -> void {
        ref.insert(pick);
        if (pick.size() == c_max) return;
        for (Count v = from; v <= left; ++v) {
          pick.push_back(v);
          self(self, v, left - v);
          pick.pop_back();
        }
      };
      rec(rec, 0, m);
      const auto states = enumerate_population_states(1, c_max, m, 1'000'000);
      EXPECT_EQ(states.size(), ref.size()) << c_max << " " << m;
      std::set<PopulationState> unique(states.begin(), states.end());
      EXPECT_EQ(unique.size(), states.size());
    }
  }
  EXPECT_THROW(enumerate_population_states(2, 8, 16, 1000), ModelError);
}

TEST(Enumeration, SamplesStayInBounds) {
  Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    const auto n = sample_population_state(2, 3, 30, 60, rng);
    EXPECT_GE(total_compartments(n), 3u);
    EXPECT_LE(total_compartments(n), 30u);
    EXPECT_LE(population_mass(n), 60u);
  }
}

TEST(PopulationDrift, ConditionBCertificate) {
  const Model4Params p{1, 1, 1, 2, 3, 0, 0};
  const auto m = point_model(p);
  const auto c = classify_regime(m);
  ASSERT_EQ(c.condition, "b");
  RegionSpec defaults;
  defaults.sample_c_max = 30;
  defaults.sample_mass_max = 60;
  const auto r = check_certificate(m, c, defaults);
  EXPECT_TRUE(r.passed()) << r.violation_count;
  EXPECT_GT(r.states_in_scope, 0u);
}

TEST(PopulationDrift, ConstantFunction) {
  const auto m = point_model(ones());
  const auto V = CandidateFunction::constant(3.0);
  const auto fail = check_population_drift(m, V, {BoundForm::le_minus_one_outside, 0, 0}, {});
  EXPECT_FALSE(fail.passed());
  EXPECT_EQ(fail.max_drift, 0.0);
  const auto pass = check_population_drift(m, V, {BoundForm::le_cv_plus_d, 0, 0}, {});
  EXPECT_TRUE(pass.passed());
  EXPECT_EQ(pass.states_in_scope, pass.states_checked);
}

TEST(PopulationDrift, TransienceWitness) {
  const Model4Params p{2, 0, 1, 1, 2, 0, 0};
  const auto m = point_model(p);
  const auto c = classify_regime(m);
  ASSERT_EQ(c.regime, Regime::transient);
  ASSERT_TRUE(c.certificate && c.certificate->k_epsilon);
  EXPECT_GT(c.certificate->alpha, 0.5);
  EXPECT_LT(c.certificate->alpha, 1.0);
  const auto r = check_certificate(m, c);
  EXPECT_TRUE(r.passed()) << r.violation_count;
  EXPECT_GT(r.states_in_scope, 0u);
}

TEST(PopulationDrift, ViolationsAreListedAndCounted) {
  const auto m = point_model(ones());
  const auto V = CandidateFunction::population_weighted(0.01, {1.0});
  const auto r = check_population_drift(m, V, {BoundForm::ge_zero_outside, 0, 0}, {});
  EXPECT_GT(r.violation_count, 0u);
  EXPECT_EQ(r.violations.size(), std::min<std::uint64_t>(r.violation_count, DriftReport::kMaxListed));
  for (const auto& v : r.violations) EXPECT_LT(v.drift, v.bound);
}
