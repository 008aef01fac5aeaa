#pragma once

// The user-side's ZD-based incentive controller: predicts whether the
// miner-side is heading for the earliest start level and picks a payoff
// target on a sigmoid schedule accordingly.

#include <Eigen/Dense>

#include "feegame/zdengine.hpp"

namespace feegame {

// Empirical miner transitions a -> r with additive smoothing.
class TransitionEstimate {
 public:
  explicit TransitionEstimate(int eta1, double smoothing = 1.0);

  int eta1() const { return eta1_; }
  double smoothing() const { return smoothing_; }
  const Eigen::MatrixXd& counts() const { return counts_; }
  const Eigen::MatrixXd& probabilities() const { return prob_; }
  double probability(int a, int r) const { return prob_(a, r); }

  void observe(int a, int r);

 private:
  void rebuild_row(int a);

  int eta1_;
  double smoothing_;
  Eigen::MatrixXd counts_;
  Eigen::MatrixXd prob_;
};

// Returns the estimate after recording one transition.
TransitionEstimate update_transition_estimate(TransitionEstimate estimate, int a, int r);

enum class Branch { none, reward, penalty };

const char* branch_name(Branch b);

struct MechanismParams {
  double omega1 = 0.4;
  double omega2 = 0.8;
  double kappa_cap = 1e6;

  friend bool operator==(const MechanismParams&, const MechanismParams&) = default;
};

struct MechanismState {
  double kappa = 0.0;
  MechanismParams params;
  PayoffRange range;
  int last_miner_level = -1;
  long round_index = 0;
  bool last_clamped = false;
};

struct MechanismInit {
  MechanismState state;
  double initial_target = 0.0;
};

MechanismInit init_mechanism(const TransitionEstimate& estimate, const PayoffRange& range,
                             const MechanismParams& params = {});

// P(rho -> eta1) is a (possibly tied) maximum of row rho.
bool classify_early_bird(const TransitionEstimate& estimate, int rho);

struct RoundTarget {
  MechanismState state;
  double target = 0.0;
  Branch branch = Branch::none;
  bool clamped = false;
};

RoundTarget mechanism_round_target(const MechanismState& state, const TransitionEstimate& estimate, int rho);

}  // namespace feegame
