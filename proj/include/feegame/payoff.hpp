#pragma once

// Out-circle stage game between the aggregated miner-side (start-up strategy
// x in [0,1]) and user-side (fee y in [0, F_h]).

#include <string>
#include <utility>

namespace feegame {

enum class FunctionFamily { linear, affine, power };

// A serializable nondecreasing scalar function.
//   linear: scale * v
//   affine: scale * v + offset
//   power:  scale * v^exponent + offset
struct MonotoneFunction {
  FunctionFamily family = FunctionFamily::linear;
  double scale = 1.0;
  double offset = 0.0;
  double exponent = 1.0;

  static MonotoneFunction linear(double scale) { return {FunctionFamily::linear, scale, 0.0, 1.0}; }
  static MonotoneFunction affine(double scale, double offset) {
    return {FunctionFamily::affine, scale, offset, 1.0};
  }
  static MonotoneFunction power(double scale, double exponent, double offset = 0.0) {
    return {FunctionFamily::power, scale, offset, exponent};
  }

  double operator()(double v) const;
  bool nondecreasing() const;
  bool strictly_increasing() const;

  // Text form used by the config file, e.g. "affine(1, 0.5)".
  std::string to_string() const;
  static MonotoneFunction parse(const std::string& text);

  friend bool operator==(const MonotoneFunction&, const MonotoneFunction&) = default;
};

struct EconomicParams {
  double varpi_m = 0.4;
  double varkappa_m = 0.6;
  double varpi_u = 0.4;
  double varkappa_u = 0.6;
  double max_fee = 10.0;
  double subsidy = 6.25;
  double round_duration = 10.0;

  // Throws ModelError on a violated invariant.
  void validate() const;

  friend bool operator==(const EconomicParams&, const EconomicParams&) = default;
};

// chi_m(y) = chi_m_fn(y) + subsidy; the other three are used as-is.
struct SidePayoffModel {
  MonotoneFunction chi_m = MonotoneFunction::linear(1.0);
  MonotoneFunction chi_u = MonotoneFunction::linear(1.0);
  MonotoneFunction xi_m = MonotoneFunction::linear(1.0);
  MonotoneFunction xi_u = MonotoneFunction::linear(1.0);
  EconomicParams params;

  // chi_m(y)=y+6.25, chi_u(x)=x, Xi_m(x)=x, Xi_u(y)=y, varpi=0.4, varkappa=0.6, F_h=10.
  static SidePayoffModel linear_default() { return {}; }

  double miner_profit(double y) const { return chi_m(y) + params.subsidy; }

  void validate() const;

  friend bool operator==(const SidePayoffModel&, const SidePayoffModel&) = default;
};

double miner_side_payoff(const SidePayoffModel& model, double x, double y);
double user_side_payoff(const SidePayoffModel& model, double x, double y);

struct StagePoint {
  double x = 0.0;
  double y = 0.0;
};

// Myopic equilibrium of the one-shot game: both sides pay only costs for
// larger strategies, so with strictly increasing costs it is (0, 0).
StagePoint stage_equilibrium(const SidePayoffModel& model);

}  // namespace feegame
