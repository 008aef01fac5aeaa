#pragma once

// Discretized out-circle Markov game and zero-determinant (ZD) policies for
// the user-side.
//
// Joint outcomes (a, b) pair a miner level a in {0..eta1} with a fee level b in
// {0..eta2}; the outcome index is a * (eta2 + 1) + b. The user-side conditions
// its fee on the previous outcome, the miner-side conditions its level on the
// current fee, so one round moves (a, b) -> (r, s) with probability
// q[(a,b)][s] * p[s][r].

#include <cstddef>
#include <optional>
#include <utility>

#include <Eigen/Dense>

#include "feegame/payoff.hpp"

namespace feegame {

class StrategyGrid {
 public:
  StrategyGrid(int eta1, int eta2, double max_fee);

  int eta1() const { return eta1_; }
  int eta2() const { return eta2_; }
  double max_fee() const { return max_fee_; }
  double mu1() const { return 1.0 / eta1_; }
  double mu2() const { return max_fee_ / eta2_; }

  int miner_levels() const { return eta1_ + 1; }
  int fee_levels() const { return eta2_ + 1; }
  int outcomes() const { return miner_levels() * fee_levels(); }
  int outcome_index(int a, int b) const { return a * fee_levels() + b; }
  std::pair<int, int> outcome_levels(int index) const { return {index / fee_levels(), index % fee_levels()}; }

  // Exact at the end points: miner_value(eta1) == 1, fee_value(eta2) == F_h.
  double miner_value(int a) const;
  double fee_value(int s) const;

  friend bool operator==(const StrategyGrid&, const StrategyGrid&) = default;

 private:
  int eta1_;
  int eta2_;
  double max_fee_;
};

struct PayoffTables {
  StrategyGrid grid;
  Eigen::VectorXd miner;  // S_M, one entry per outcome
  Eigen::VectorXd user;   // S_U
};

PayoffTables make_payoff_tables(const StrategyGrid& grid, const SidePayoffModel& model);

// Rows: previous outcome (a,b). Columns: current fee level s.
struct UserPolicy {
  StrategyGrid grid;
  Eigen::MatrixXd q;

  void validate(double tol = 1e-12) const;
};

// Rows: current fee level s. Columns: miner level r.
struct MinerPolicy {
  StrategyGrid grid;
  Eigen::MatrixXd p;

  void validate(double tol = 1e-12) const;
};

UserPolicy uniform_user_policy(const StrategyGrid& grid);
MinerPolicy uniform_miner_policy(const StrategyGrid& grid);

Eigen::MatrixXd build_transition_matrix(const UserPolicy& q, const MinerPolicy& p);

enum class StationaryMethod { direct, power };

struct StationaryOptions {
  StationaryMethod method = StationaryMethod::direct;
  double damping = 1e-8;
  double tolerance = 1e-12;
  long max_iterations = 1'000'000;
};

struct StationaryResult {
  Eigen::VectorXd sigma;
  bool damped = false;  // true when damping toward uniform was mixed in
  double damping = 0.0;
  double residual = 0.0;  // ||sigma Gamma - sigma||_inf against the undamped matrix
  long iterations = 0;
};

// Throws DomainError for a non-stochastic matrix and ConvergenceError when the
// power method hits its iteration cap.
StationaryResult stationary_distribution(const Eigen::MatrixXd& matrix, const StationaryOptions& options = {});

struct ExpectedPayoffs {
  double miner = 0.0;
  double user = 0.0;
};

ExpectedPayoffs expected_payoffs(const Eigen::VectorXd& sigma, const PayoffTables& tables);

struct PayoffRange {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v, double tol = 0.0) const { return v >= lo - tol && v <= hi + tol; }
};

// [S_m(0,0), S_m(1,F_h)]: the miner payoffs the user-side can pin.
PayoffRange controllable_payoff_range(const PayoffTables& tables);

struct ZDCoefficients {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double target() const { return -gamma / alpha; }
};

// How a row spreads its mass once the mean fee it must pay is fixed.
//   zero:    mean on F_h, the rest on fee level 0
//   uniform: as much mass as possible uniform over all levels, the rest on
//            whichever extreme level keeps the mean
enum class ResidualRule { zero, uniform };

struct ZDPolicy {
  UserPolicy policy;
  ZDCoefficients coefficients;
};

// Mean fee fraction the ZD user must play after outcome (a,b):
//   b/eta2 + alpha*S_M(a,b) + beta*S_U(a,b) + gamma.
double zd_mean_fee_fraction(const PayoffTables& tables, const ZDCoefficients& c, int outcome);

// Pins the miner-side's stationary payoff at `target` (beta = 0). Throws
// InfeasibleTargetError outside controllable_payoff_range and
// DegenerateTargetError when only alpha ~ 0 is feasible.
ZDPolicy zd_user_policy(const PayoffTables& tables, double target, ResidualRule rule = ResidualRule::zero);

// Builds the policy for arbitrary coefficients; DomainError if some row would
// need a mean fee outside [0,1].
UserPolicy zd_policy_from_coefficients(const PayoffTables& tables, const ZDCoefficients& c,
                                       ResidualRule rule = ResidualRule::zero);

// |alpha E_m + beta E_u + gamma| at the stationary distribution of (q, p).
double verify_linear_relation(const UserPolicy& q, const ZDCoefficients& c, const MinerPolicy& p,
                              const PayoffTables& tables, const StationaryOptions& options = {});

}  // namespace feegame
