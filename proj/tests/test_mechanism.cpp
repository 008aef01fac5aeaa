#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "feegame/errors.hpp"
#include "feegame/mechanism.hpp"

using namespace feegame;

namespace {
const PayoffRange kRange{2.5, 5.9};
}

TEST_CASE("fresh estimates are uniform") {
  TransitionEstimate est(10);
  CHECK((est.probabilities().array() - 1.0 / 11).abs().maxCoeff() < 1e-15);
  CHECK(est.counts().sum() == 0.0);
  CHECK_THROWS_AS(TransitionEstimate(0), ConfigurationError);
  CHECK_THROWS_AS(TransitionEstimate(3, 0.0), ConfigurationError);
  CHECK_THROWS_AS(est.observe(11, 0), DomainError);
  CHECK_THROWS_AS(est.observe(0, -1), DomainError);
}

TEST_CASE("initial target from a uniform estimate") {
  const auto init = init_mechanism(TransitionEstimate(10), kRange);
  CHECK(init.state.kappa == doctest::Approx(1.0 / 11).epsilon(1e-14));
  CHECK(init.initial_target == doctest::Approx(1.0 / 11 * 3.4 + 2.5).epsilon(1e-14));
  CHECK(init.initial_target == doctest::Approx(2.809).epsilon(1e-3));
}

TEST_CASE("initial target at the extremes") {
  TransitionEstimate all_early(10, 1e-12);
  for (int a = 0; a <= 10; ++a) all_early.observe(a, 10);
  auto init = init_mechanism(all_early, kRange);
  CHECK(init.state.kappa == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(init.initial_target == doctest::Approx(5.9).epsilon(1e-9));

  TransitionEstimate never_early(10);
  for (int a = 0; a <= 10; ++a)
    for (int k = 0; k < 1000; ++k) never_early.observe(a, 0);
  init = init_mechanism(never_early, kRange);
  CHECK(init.initial_target == doctest::Approx(2.5 + 3.4 / 1011).epsilon(1e-12));
  CHECK(init.initial_target - 2.5 < 0.005);
}

TEST_CASE("early-bird classification") {
  TransitionEstimate est(4);
  est.observe(2, 4);
  CHECK(classify_early_bird(est, 2));  // strictly largest
  CHECK(classify_early_bird(est, 1));  // tied with every other entry
  est.observe(3, 4);
  est.observe(3, 1);
  CHECK(classify_early_bird(est, 3));  // tied for largest
  est.observe(0, 1);
  CHECK_FALSE(classify_early_bird(est, 0));
  CHECK_THROWS_AS(classify_early_bird(est, 5), DomainError);
}

TEST_CASE("reward branch saturates at the upper end") {
  TransitionEstimate est(10);
  MechanismState s = init_mechanism(est, kRange).state;
  s.kappa = 1e4;
  const auto rt = mechanism_round_target(s, est, 10);
  CHECK(rt.branch == Branch::reward);
  CHECK(rt.target == doctest::Approx(5.9).epsilon(1e-12));
  CHECK(rt.state.kappa == doctest::Approx(1e4 * (1.0 + 1.0 / 11)));
}

TEST_CASE("penalty branch saturates at the lower end") {
  TransitionEstimate est(10);
  est.observe(3, 0);
  MechanismState s = init_mechanism(est, kRange).state;
  s.kappa = 1e4;
  const auto rt = mechanism_round_target(s, est, 3);
  CHECK(rt.branch == Branch::penalty);
  CHECK(rt.target == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(rt.state.kappa == doctest::Approx(1e4 * (1.0 + 12.0)));
}

TEST_CASE("penalty branch at zero kappa") {
  TransitionEstimate est(10);
  est.observe(0, 0);
  MechanismState s = init_mechanism(est, kRange).state;
  s.kappa = 0.0;
  const auto rt = mechanism_round_target(s, est, 0);
  CHECK(rt.branch == Branch::penalty);
  CHECK(rt.target == doctest::Approx(3.75).epsilon(1e-15));
}

TEST_CASE("reward branch formula before saturation") {
  TransitionEstimate est(10);
  MechanismState s = init_mechanism(est, kRange).state;
  const double kappa = (1.0 + 1.0 / 11) * s.kappa;
  const auto rt = mechanism_round_target(s, est, 4);
  CHECK(rt.target == doctest::Approx(5.9 / (1.0 + std::exp(-0.4 * kappa))).epsilon(1e-14));
  CHECK_FALSE(rt.clamped);
}

TEST_CASE("targets are clamped into the range and flagged") {
  TransitionEstimate est(10);
  const PayoffRange narrow{5.0, 5.9};
  MechanismState s = init_mechanism(est, narrow).state;
  const auto rt = mechanism_round_target(s, est, 10);
  CHECK(rt.target == 5.0);
  CHECK(rt.clamped);
  CHECK(rt.state.last_clamped);
}

TEST_CASE("kappa grows strictly and targets stay feasible on mixed branch sequences") {
  std::mt19937_64 rng(8);
  TransitionEstimate est(10);
  MechanismState s = init_mechanism(est, kRange).state;
  std::uniform_int_distribution<int> lvl(0, 10);
  for (int k = 0; k < 300; ++k) {
    const int a = lvl(rng), r = lvl(rng);
    est.observe(a, r);
    const auto rt = mechanism_round_target(s, est, r);
    CHECK(rt.state.kappa > s.kappa);
    CHECK(kRange.contains(rt.target));
    CHECK(rt.state.round_index == s.round_index + 1);
    s = rt.state;
    if (s.kappa >= s.params.kappa_cap) break;
  }
}

TEST_CASE("repeated branches move targets monotonically toward the ends") {
  TransitionEstimate early(10);
  early.observe(10, 10);
  MechanismState s = init_mechanism(early, kRange).state;
  double last = 0.0;
  for (int k = 0; k < 200; ++k) {
    const auto rt = mechanism_round_target(s, early, 10);
    CHECK(rt.branch == Branch::reward);
    CHECK(rt.target >= last);
    last = rt.target;
    s = rt.state;
  }
  CHECK(last == doctest::Approx(5.9).epsilon(1e-6));

  TransitionEstimate late(10);
  late.observe(2, 0);
  s = init_mechanism(late, kRange).state;
  last = 1e9;
  for (int k = 0; k < 200; ++k) {
    const auto rt = mechanism_round_target(s, late, 2);
    CHECK(rt.branch == Branch::penalty);
    CHECK(rt.target <= last);
    last = rt.target;
    s = rt.state;
  }
  CHECK(last == doctest::Approx(2.5).epsilon(1e-9));
}

TEST_CASE("kappa is capped") {
  TransitionEstimate est(10);
  est.observe(1, 0);
  MechanismState s = init_mechanism(est, kRange).state;
  for (int k = 0; k < 100; ++k) s = mechanism_round_target(s, est, 1).state;
  CHECK(s.kappa == 1e6);
  CHECK(std::isfinite(mechanism_round_target(s, est, 1).target));
}

TEST_CASE("transition estimate updates") {
  TransitionEstimate est(10);
  double last = est.probability(10, 10);
  for (int k = 0; k < 200; ++k) {
    est = update_transition_estimate(est, 10, 10);
    CHECK(est.probability(10, 10) > last);
    last = est.probability(10, 10);
  }
  CHECK(last == doctest::Approx(201.0 / 211));
  CHECK((est.probabilities().rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-14);
}

TEST_CASE("estimate tracks an empirical distribution within the smoothing bias") {
  std::mt19937_64 rng(3);
  std::discrete_distribution<int> pick({0.1, 0.2, 0.3, 0.4});
  TransitionEstimate est(3);
  std::vector<double> counts(4, 0.0);
  for (int k = 0; k < 100; ++k) {
    const int r = pick(rng);
    counts[r] += 1.0;
    est.observe(1, r);
  }
  const double bound = 4.0 / (100.0 + 4.0);
  for (int r = 0; r < 4; ++r) CHECK(std::abs(est.probability(1, r) - counts[r] / 100.0) <= bound + 1e-15);
}

TEST_CASE("smoothing keeps every entry positive") {
  std::mt19937_64 rng(4);
  TransitionEstimate est(5, 0.5);
  std::uniform_int_distribution<int> lvl(0, 5);
  for (int k = 0; k < 2000; ++k) est.observe(lvl(rng), k % 3 == 0 ? 5 : 0);
  for (int a = 0; a <= 5; ++a) {
    const double floor = 0.5 / (est.counts().row(a).sum() + 6 * 0.5);
    CHECK(est.probabilities().row(a).minCoeff() >= floor - 1e-15);
    CHECK(est.probabilities().row(a).minCoeff() > 0.0);
  }
}
