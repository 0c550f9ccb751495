#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <map>

#include "cfrag/crn.hpp"
#include "cfrag/errors.hpp"
#include "cfrag/lyapunov.hpp"
#include "cfrag/rng.hpp"
#include "oracles.hpp"

using namespace cfrag;

namespace {

ReactionNetwork birth_death(double kb, double kd) {
  return ReactionNetwork({"S"}, {{{0}, {1}, kb}, {{1}, {0}, kd}});
}

// E -> 2E, E + S -> E + 2S.
ReactionNetwork enzyme_growth() {
  return ReactionNetwork({"E", "S"}, {{{1, 0}, {2, 0}, 1.0}, {{1, 1}, {1, 2}, 1.0}});
}

// 0 -> E, E + 2S -> E + 3S at 2 alpha.
ReactionNetwork example_network(double alpha) {
  return ReactionNetwork({"E", "S"}, {{{0, 0}, {1, 0}, 1.0}, {{1, 2}, {1, 3}, 2.0 * alpha}});
}

}  // namespace

TEST(Checked, ArithmeticThrowsOnOverflow) {
  const Count max = std::numeric_limits<Count>::max();
  EXPECT_EQ(checked_add(max - 1, 1), max);
  EXPECT_THROW(checked_add(max, 1), OverflowError);
  EXPECT_THROW(checked_sub(0, 1), OverflowError);
  EXPECT_THROW(checked_mul(Count{1} << 33, Count{1} << 31), OverflowError);
  EXPECT_THROW(apply_delta({max}, {1}), OverflowError);
  EXPECT_THROW(apply_delta({0}, {-1}), OverflowError);
  EXPECT_EQ(apply_delta({3, 4}, {-3, 2}), (Complex{0, 6}));
}

TEST(Binomial, ExactAndFloatingAgree) {
  EXPECT_EQ(binomial_exact(5, 2), Count{10});
  EXPECT_EQ(binomial_exact(3, 5), Count{0});
  EXPECT_EQ(binomial_exact(7, 0), Count{1});
  EXPECT_FALSE(binomial_exact(200, 100).has_value());
  for (Count x = 0; x <= 60; ++x) {
    for (Count y = 0; y <= x + 1; ++y) {
      EXPECT_EQ(falling_binomial(x, y), static_cast<double>(*binomial_exact(x, y)));
    }
  }
  // Beyond 64 bits: compare with lgamma.
  const double ref = std::exp(std::lgamma(201.0) - 2 * std::lgamma(101.0));
  EXPECT_NEAR(falling_binomial(200, 100) / ref, 1.0, 1e-10);
  const double ref_log = std::lgamma(1001.0) - std::lgamma(501.0) - std::lgamma(501.0);
  EXPECT_NEAR(std::log(falling_binomial(1000, 500)), ref_log, 1e-9 * ref_log);
  EXPECT_TRUE(std::isinf(falling_binomial(10000, 5000)));
}

TEST(MassAction, Examples) {
  const auto net = example_network(1.0);
  EXPECT_DOUBLE_EQ(mass_action_rate(net.reactions()[1], {1, 3}), 6.0);
  EXPECT_DOUBLE_EQ(mass_action_rate(net.reactions()[1], {1, 1}), 0.0);
  const auto bd = birth_death(2.0, 1.0);
  for (Count x : {0, 5, 1000}) EXPECT_DOUBLE_EQ(mass_action_rate(bd.reactions()[0], {x}), 2.0);
  EXPECT_THROW(mass_action_rate(bd.reactions()[0], {1, 2}), ModelError);
}

TEST(MassAction, MatchesSubsetEnumeration) {
  // Every source with coordinates <= 3 against every state of total <= 8.
  for (Count a = 0; a <= 8; ++a) {
    for (Count b = 0; a + b <= 8; ++b) {
      for (Count u = 0; u <= 3; ++u) {
        for (Count v = 0; v <= 3; ++v) {
          const Reaction r{{u, v}, {0, 0}, 1.5};
          ASSERT_DOUBLE_EQ(mass_action_rate(r, {a, b}), oracle::mass_action(r, {a, b}))
              << "source (" << u << "," << v << ") state (" << a << "," << b << ")";
        }
      }
    }
  }
}

TEST(Transitions, Examples) {
  const auto net = example_network(1.0);
  auto t = enabled_transitions(net, {0, 0});
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].delta, (Delta{1, 0}));
  EXPECT_DOUBLE_EQ(t[0].rate, 1.0);

  t = enabled_transitions(birth_death(1, 1), {0});
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].delta, Delta{1});

  t = enabled_transitions(birth_death(2, 3), {4});
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].delta, Delta{1});
  EXPECT_DOUBLE_EQ(t[0].rate, 2.0);
  EXPECT_EQ(t[1].delta, Delta{-1});
  EXPECT_DOUBLE_EQ(t[1].rate, 12.0);
}

TEST(Transitions, NeverLeaveTheOrthant) {
  Rng rng(11);
  const ReactionNetwork net({"A", "B"}, {{{2, 0}, {0, 1}, 1.0}, {{0, 1}, {2, 0}, 0.5}, {{1, 1}, {0, 0}, 2.0}});
  for (int i = 0; i < 2000; ++i) {
    const CrnState x{rng.below(6), rng.below(6)};
    for (const auto& t : enabled_transitions(net, x)) {
      EXPECT_GT(t.rate, 0.0);
      EXPECT_NO_THROW(apply_delta(x, t.delta));
    }
  }
}

TEST(Generator, Examples) {
  const auto bd = birth_death(2, 1);
  const CrnFunction id = [](const CrnState& x) { return static_cast<double>(x[0]); };
  EXPECT_DOUBLE_EQ(apply_crn_generator(bd, id, {3}), -1.0);

  const CrnFunction constant = [](const CrnState&) { return 7.0; };
  EXPECT_EQ(apply_crn_generator(enzyme_growth(), constant, {5, 9}), 0.0);

  const auto g = CandidateFunction::log_shift().as_crn_function();
  const double expected = 2.0 + 6.0 * std::log(5.0 / 4.0);
  EXPECT_NEAR(apply_crn_generator(enzyme_growth(), g, {2, 3}), expected, 1e-12);
  EXPECT_NEAR(expected, 3.3388, 1e-4);
}

TEST(Generator, Linearity) {
  Rng rng(12);
  const ReactionNetwork net({"A", "B"}, {{{0, 0}, {1, 0}, 0.7}, {{1, 0}, {0, 1}, 1.3}, {{0, 2}, {1, 0}, 0.4}});
  for (int trial = 0; trial < 50; ++trial) {
    std::map<CrnState, double> tf, tg;
    for (Count a = 0; a <= 7; ++a) {
      for (Count b = 0; b <= 7; ++b) {
        tf[{a, b}] = rng.uniform() * 10 - 5;
        tg[{a, b}] = rng.uniform() * 10 - 5;
      }
    }
    const double a = static_cast<double>(rng.below(19)) / 7.0 - 1.0;
    const double b = static_cast<double>(rng.below(23)) / 11.0 - 1.0;
    const CrnFunction f = [&](const CrnState& x) { return tf.at(x); };
    const CrnFunction g = [&](const CrnState& x) { return tg.at(x); };
    const CrnFunction h = [&](const CrnState& x) { return a * tf.at(x) + b * tg.at(x); };
    const CrnState x{rng.below(6), rng.below(6)};
    const double lhs = apply_crn_generator(net, h, x);
    const double rhs = a * apply_crn_generator(net, f, x) + b * apply_crn_generator(net, g, x);
    EXPECT_NEAR(lhs, rhs, 1e-12 * (1.0 + std::abs(rhs)));
  }
}

TEST(Generator, BirthDeathIdentityExact) {
  Rng rng(13);
  const CrnFunction id = [](const CrnState& x) { return static_cast<double>(x[0]); };
  for (int t = 0; t < 10; ++t) {
    const double kb = rng.uniform() * 5, kd = rng.uniform() * 5;
    const auto net = birth_death(kb, kd);
    for (Count x = 0; x <= 10000; ++x) {
      ASSERT_NEAR(apply_crn_generator(net, id, {x}), kb - kd * static_cast<double>(x),
                  1e-12 * (1.0 + kd * static_cast<double>(x)));
    }
  }
}

TEST(Generator, EnzymeGrowthLogBound) {
  // A g <= 2 g for g(e, s) = e + ln(s + 1).
  const auto net = enzyme_growth();
  const auto g = CandidateFunction::log_shift().as_crn_function();
  for (Count e = 0; e <= 500; ++e) {
    for (Count s = 0; s <= 500; ++s) {
      ASSERT_LE(apply_crn_generator(net, g, {e, s}), 2.0 * g({e, s}) + 1e-9) << e << "," << s;
    }
  }
}

TEST(Network, ValidationAndDescribe) {
  EXPECT_THROW(ReactionNetwork({"A"}, {{{1, 0}, {0}, 1.0}}), ModelError);
  EXPECT_THROW(ReactionNetwork({"A"}, {{{1}, {0}, -1.0}}), ModelError);
  EXPECT_THROW(ReactionNetwork({"A", "A"}, {}), ModelError);
  const auto net = example_network(1.0);
  EXPECT_EQ(net.describe(1), "E + 2S -> E + 3S");
  EXPECT_EQ(net.describe(0), "0 -> E");
  EXPECT_EQ(net.species_index("S"), 1u);
  EXPECT_FALSE(net.find_species("X").has_value());
}

TEST(Network, ZeroRateReactionsAreKeptButInactive) {
  const ReactionNetwork net({"S"}, {{{0}, {1}, 0.0}, {{1}, {0}, 1.0}});
  EXPECT_EQ(net.reactions().size(), 2u);
  ASSERT_EQ(net.active_reactions().size(), 1u);
  EXPECT_EQ(net.active_reactions()[0], 1u);
}

TEST(SimulateCrn, PoissonEventCount) {
  const ReactionNetwork net({"S"}, {{{0}, {1}, 1.0}});
  CrnStopCondition stop;
  stop.t_max = 10.0;
  double sum = 0.0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const auto r = simulate_crn(net, {0}, stop, s);
    EXPECT_EQ(r.final_state[0], r.event_count);
    sum += static_cast<double>(r.event_count);
  }
  EXPECT_GE(sum / 1000, 9.0);
  EXPECT_LE(sum / 1000, 11.0);
}

TEST(SimulateCrn, AllZeroRatesAbsorbImmediately) {
  const ReactionNetwork net({"S"}, {{{0}, {1}, 0.0}});
  CrnStopCondition stop;
  stop.t_max = 10.0;
  const auto r = simulate_crn(net, {3}, stop, 0);
  EXPECT_EQ(r.event_count, 0u);
  EXPECT_EQ(r.stop_reason, StopReason::absorbed);
  EXPECT_EQ(r.final_time, 0.0);
}

TEST(SimulateCrn, ProjectionFirstEventSplit) {
  // 2X -> X, X -> X + E, E + S -> E + 2S, S -> S + X from (1, 0, 1).
  const ReactionNetwork net({"X", "E", "S"}, {{{2, 0, 0}, {1, 0, 0}, 1.0},
                                              {{1, 0, 0}, {1, 1, 0}, 1.0},
                                              {{0, 1, 1}, {0, 1, 2}, 1.0},
                                              {{0, 0, 1}, {1, 0, 1}, 1.0}});
  CrnStopCondition stop;
  stop.event_budget = 1;
  std::vector<std::uint64_t> counts(4, 0);
  const int draws = 100000;
  for (int s = 0; s < draws; ++s) {
    const auto r = simulate_crn(net, {1, 0, 1}, stop, static_cast<std::uint64_t>(s), true);
    ASSERT_EQ(r.events.size(), 1u);
    ++counts[r.events[0].reaction];
  }
  EXPECT_EQ(counts[0], 0u);
  EXPECT_EQ(counts[2], 0u);
  EXPECT_NEAR(static_cast<double>(counts[1]) / draws, 0.5, 0.03);
  EXPECT_GT(oracle::chi_square_p_value(counts, {0.0, 0.5, 0.0, 0.5}), 0.001);
}

TEST(SimulateCrn, SeedDeterminism) {
  const auto net = enzyme_growth();
  CrnStopCondition stop;
  stop.event_budget = 5000;
  const auto a = simulate_crn(net, {1, 1}, stop, 99, true);
  const auto b = simulate_crn(net, {1, 1}, stop, 99, true);
  ASSERT_EQ(a.events.size(), b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    EXPECT_EQ(a.events[i].time, b.events[i].time);
    EXPECT_EQ(a.events[i].reaction, b.events[i].reaction);
  }
  EXPECT_EQ(a.final_state, b.final_state);
}
