#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "feegame/errors.hpp"
#include "feegame/payoff.hpp"
#include "oracles.hpp"

using namespace feegame;

TEST_CASE("miner-side payoff on the linear model") {
  const auto m = SidePayoffModel::linear_default();
  CHECK(miner_side_payoff(m, 0, 0) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(miner_side_payoff(m, 1, 10) == doctest::Approx(5.9).epsilon(1e-15));
  CHECK(miner_side_payoff(m, 1, 0) == doctest::Approx(1.9).epsilon(1e-15));
}

TEST_CASE("user-side payoff on the linear model") {
  const auto m = SidePayoffModel::linear_default();
  CHECK(user_side_payoff(m, 0, 0) == 0.0);
  CHECK(user_side_payoff(m, 1, 10) == doctest::Approx(-5.6).epsilon(1e-15));
  CHECK(user_side_payoff(m, 1, 0) == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("payoffs agree with the closed form across the strategy square") {
  const auto m = SidePayoffModel::linear_default();
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 20; ++j) {
      const double x = i / 20.0, y = j / 2.0;
      CHECK(miner_side_payoff(m, x, y) == doctest::Approx(oracle::linear_sm(x, y)).epsilon(1e-14));
      CHECK(user_side_payoff(m, x, y) == doctest::Approx(oracle::linear_su(x, y)).epsilon(1e-14));
    }
  }
}

TEST_CASE("out-of-domain strategies are rejected") {
  const auto m = SidePayoffModel::linear_default();
  CHECK_THROWS_AS(miner_side_payoff(m, -0.01, 0), DomainError);
  CHECK_THROWS_AS(miner_side_payoff(m, 1.01, 0), DomainError);
  CHECK_THROWS_AS(miner_side_payoff(m, 0.5, 10.5), DomainError);
  CHECK_THROWS_AS(user_side_payoff(m, 0.5, -1), DomainError);
  CHECK_THROWS_AS(user_side_payoff(m, std::nan(""), 1), DomainError);
}

TEST_CASE("monotone in each argument on a 50x50 grid") {
  SidePayoffModel models[2] = {SidePayoffModel::linear_default(), SidePayoffModel::linear_default()};
  models[1].chi_m = MonotoneFunction::power(2.0, 0.5);
  models[1].xi_m = MonotoneFunction::power(1.0, 2.0);
  models[1].chi_u = MonotoneFunction::affine(3.0, 1.0);
  models[1].xi_u = MonotoneFunction::power(0.5, 1.5, 0.2);
  for (const auto& m : models) {
    const double fh = m.params.max_fee;
    for (int i = 0; i < 50; ++i) {
      for (int j = 0; j < 50; ++j) {
        const double x = i / 49.0, y = fh * j / 49.0;
        if (j + 1 < 50) {
          const double y2 = fh * (j + 1) / 49.0;
          CHECK(miner_side_payoff(m, x, y) <= miner_side_payoff(m, x, y2));
          CHECK(user_side_payoff(m, x, y) >= user_side_payoff(m, x, y2));
        }
        if (i + 1 < 50) {
          const double x2 = (i + 1) / 49.0;
          CHECK(miner_side_payoff(m, x, y) >= miner_side_payoff(m, x2, y));
          CHECK(user_side_payoff(m, x, y) <= user_side_payoff(m, x2, y));
        }
      }
    }
  }
}

TEST_CASE("stage equilibrium") {
  auto m = SidePayoffModel::linear_default();
  auto eq = stage_equilibrium(m);
  CHECK(eq.x == 0.0);
  CHECK(eq.y == 0.0);

  auto squared = m;
  squared.xi_m = MonotoneFunction::power(1.0, 2.0);
  squared.xi_u = MonotoneFunction::power(1.0, 2.0);
  eq = stage_equilibrium(squared);
  CHECK(eq.x == 0.0);
  CHECK(eq.y == 0.0);

  auto constant = m;
  constant.xi_m = MonotoneFunction::linear(0.0);
  constant.xi_u = MonotoneFunction::affine(0.0, 1.0);
  CHECK_THROWS_AS(stage_equilibrium(constant), PreconditionError);
}

TEST_CASE("stage equilibrium admits no profitable unilateral grid deviation") {
  auto m = SidePayoffModel::linear_default();
  m.xi_m = MonotoneFunction::power(1.0, 2.0);
  const auto eq = stage_equilibrium(m);
  const double base_m = miner_side_payoff(m, eq.x, eq.y);
  const double base_u = user_side_payoff(m, eq.x, eq.y);
  for (int k = 0; k <= 100; ++k) {
    CHECK(miner_side_payoff(m, k / 100.0, eq.y) <= base_m);
    CHECK(user_side_payoff(m, eq.x, m.params.max_fee * k / 100.0) <= base_u);
  }
}

TEST_CASE("function texts parse and print") {
  CHECK(MonotoneFunction::parse("linear(1)") == MonotoneFunction::linear(1));
  CHECK(MonotoneFunction::parse(" affine( 2 , 0.5 ) ") == MonotoneFunction::affine(2, 0.5));
  CHECK(MonotoneFunction::parse("power(1, 2)") == MonotoneFunction::power(1, 2, 0));
  for (auto f : {MonotoneFunction::linear(0.3), MonotoneFunction::affine(1.25, -0.1),
                 MonotoneFunction::power(2, 0.5, 1)}) {
    CHECK(MonotoneFunction::parse(f.to_string()) == f);
  }
  CHECK(MonotoneFunction::power(2, 0.5, 1)(4.0) == doctest::Approx(5.0));
  CHECK_THROWS_AS(MonotoneFunction::parse("cubic(1)"), ConfigurationError);
  CHECK_THROWS_AS(MonotoneFunction::parse("linear(1, 2)"), ConfigurationError);
  CHECK_THROWS_AS(MonotoneFunction::parse("linear(x)"), ConfigurationError);
  CHECK_THROWS_AS(MonotoneFunction::parse("linear 1"), ConfigurationError);
  CHECK_THROWS_AS(MonotoneFunction::parse("linear(-1)"), ModelError);
}

TEST_CASE("economic parameter invariants") {
  EconomicParams p;
  CHECK_NOTHROW(p.validate());
  for (double EconomicParams::*field : {&EconomicParams::varpi_m, &EconomicParams::varkappa_m,
                                        &EconomicParams::varpi_u, &EconomicParams::varkappa_u,
                                        &EconomicParams::max_fee, &EconomicParams::round_duration}) {
    EconomicParams bad;
    bad.*field = 0.0;
    CHECK_THROWS_AS(bad.validate(), ModelError);
  }
  EconomicParams bad;
  bad.subsidy = -1;
  CHECK_THROWS_AS(bad.validate(), ModelError);
}
