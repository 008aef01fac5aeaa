#pragma once

// Multi-miner / multi-user model: block-time density, expected payoffs,
// numerical supermodularity checks, best-response dynamics and the
// mining-gap profile.

#include <string>
#include <vector>

namespace feegame {

// How a miner's rig count alpha_i(t) depends on its strategy x_i.
//   step:      1 once t >= (1 - x_i) T
//   logistic:  1 / (1 + exp(-sharpness (t - (1 - x_i) T)))
//   constant_partials: the locally linear form alpha_i = base_activity + a x_i,
//              tau = base_rate t + d sum(x), C_m = base_cost t + g x_i, whose
//              partials a, d, g are the constants of the supermodularity
//              conditions.
enum class Activation { step, logistic, constant_partials };

std::string to_string(Activation a);
Activation parse_activation(const std::string& text);

struct ConstantPartials {
  double base_activity = 1.0;
  double a = 0.1;
  double base_rate = 1.0;
  double d = 0.5;
  double base_cost = 0.0;
  double g = 1.0;

  friend bool operator==(const ConstantPartials&, const ConstantPartials&) = default;
};

struct MiningSystemModel {
  double lambda = 1.0;
  double round_duration = 10.0;
  std::vector<double> miner_strategies;
  std::vector<double> user_fees;
  double max_fee = 10.0;
  double subsidy = 6.25;
  double cost_rate = 0.0;
  double eps_m = 1.0;
  double sig_m = 1.0;
  double eps_u = 1.0;
  double sig_u = 1.0;
  double user_value = 1.0;
  double fee_cost_slope = 1.0;
  Activation activation = Activation::step;
  double sharpness = 50.0;
  ConstantPartials partials;

  std::size_t n_miners() const { return miner_strategies.size(); }
  std::size_t n_users() const { return user_fees.size(); }

  // ModelError for lambda <= 0 or non-positive scales, DomainError for
  // strategies outside their ranges.
  void validate() const;

  friend bool operator==(const MiningSystemModel&, const MiningSystemModel&) = default;
};

double start_time(const MiningSystemModel& m, std::size_t i);
double miner_activity(const MiningSystemModel& m, std::size_t i, double t);  // alpha_i(t)
double active_rigs(const MiningSystemModel& m, double t);                     // alpha_I(t)
double miner_active_time(const MiningSystemModel& m, std::size_t i, double t);
double aggregate_duration(const MiningSystemModel& m, double t);  // tau(x, t)
double mining_cost(const MiningSystemModel& m, std::size_t i, double t);  // C_m(x_i, t)
double block_time_density(const MiningSystemModel& m, double t);

// Smallest horizon H with exp(-lambda tau(H)) < tail.
double integration_horizon(const MiningSystemModel& m, double tail = 1e-9);

// Times where the integrands change character (rig start times).
std::vector<double> breakpoints(const MiningSystemModel& m, double horizon);

// Integral of the density over [0, horizon].
double block_probability(const MiningSystemModel& m, double horizon);

double miner_expected_payoff(const MiningSystemModel& m, std::size_t i);
// Same quantity on a caller-fixed horizon (needed for finite differences).
double miner_expected_payoff(const MiningSystemModel& m, std::size_t i, double horizon);

double packaging_probability(const MiningSystemModel& m, std::size_t k);

struct UserPayoff {
  double value = 0.0;
  bool degenerate = false;  // every fee is zero, packaging probability undefined
};

UserPayoff user_expected_payoff(const MiningSystemModel& m, std::size_t k);

struct MinerGridPoint {
  double x_i = 0.0;
  double x_j = 0.0;
  bool condition_a = false;  // alpha_i lambda d - a >= 0
  bool condition_b = false;  // g >= C_m lambda d
  double mixed_partial = 0.0;
};

struct UserGridPoint {
  double y_k = 0.0;
  double y_l = 0.0;
  bool condition = false;
  double closed_form = 0.0;
  double mixed_partial = 0.0;
};

struct SupermodularReport {
  std::vector<MinerGridPoint> miner;
  std::vector<UserGridPoint> user;
  double min_mixed_partial = 0.0;
  double min_user_mixed_partial = 0.0;
  double miner_tolerance = 0.0;
  double user_tolerance = 0.0;
  bool used_surrogate = false;  // step activation replaced by its logistic form

  bool condition_a_everywhere() const;
  bool condition_b_everywhere() const;
  bool user_condition_everywhere() const;
  bool conditions_hold() const;
  bool mixed_partials_nonnegative() const;
  // Empty when everything holds.
  std::string first_violation() const;
};

struct SupermodularOptions {
  int grid_resolution = 5;
  int time_samples = 64;
  double partial_step = 1e-4;
  double mixed_step = 1e-3;
  double relative_tolerance = 1e-4;

  friend bool operator==(const SupermodularOptions&, const SupermodularOptions&) = default;
};

// Checks the closed-form conditions for miners 0,1 over a grid of (x_0, x_1)
// and users 0,1 over a grid of (y_0, y_1), with a finite-difference mixed
// partial of the expected payoff at every point.
SupermodularReport check_supermodular(const MiningSystemModel& m, const SupermodularOptions& options = {});

struct BestResponseTrajectory {
  std::vector<std::vector<double>> profiles;  // profiles[0] is the start
  bool converged = false;
};

// Simultaneous best responses of all miners on an evenly spaced grid of
// `levels` start strategies. Ties keep the current strategy, otherwise the
// largest maximizer is taken.
BestResponseTrajectory best_response_dynamics(const MiningSystemModel& m, int max_iters, int levels = 11);

struct GapSample {
  double t = 0.0;
  double income = 0.0;
  double cost = 0.0;
  bool in_gap = false;
};

struct GapProfile {
  std::vector<GapSample> samples;
  double gap_length = 0.0;
};

// Over one round [0, T]: income(t) = eps_m lambda (subsidy + sum(y) t / T),
// cost = sig_m cost_rate.
GapProfile mining_gap_profile(const MiningSystemModel& m, int time_resolution);

}  // namespace feegame
