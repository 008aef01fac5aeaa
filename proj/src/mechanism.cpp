#include "feegame/mechanism.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "feegame/errors.hpp"

namespace feegame {

TransitionEstimate::TransitionEstimate(int eta1, double smoothing)
    : eta1_(eta1),
      smoothing_(smoothing),
      counts_(Eigen::MatrixXd::Zero(eta1 + 1, eta1 + 1)),
      prob_(Eigen::MatrixXd::Constant(eta1 + 1, eta1 + 1, 1.0 / (eta1 + 1))) {
  if (eta1 < 1) throw ConfigurationError(fmt::format("eta1 must be >= 1 (got {})", eta1));
  if (!(smoothing > 0.0)) throw ConfigurationError(fmt::format("smoothing must be > 0 (got {})", smoothing));
}

void TransitionEstimate::observe(int a, int r) {
  if (a < 0 || a > eta1_ || r < 0 || r > eta1_) {
    throw DomainError(fmt::format("transition {} -> {} outside 0..{}", a, r, eta1_));
  }
  counts_(a, r) += 1.0;
  rebuild_row(a);
}

void TransitionEstimate::rebuild_row(int a) {
  const double denom = counts_.row(a).sum() + smoothing_ * (eta1_ + 1);
  prob_.row(a) = (counts_.row(a).array() + smoothing_) / denom;
}

TransitionEstimate update_transition_estimate(TransitionEstimate estimate, int a, int r) {
  estimate.observe(a, r);
  return estimate;
}

const char* branch_name(Branch b) {
  switch (b) {
    case Branch::reward:
      return "reward";
    case Branch::penalty:
      return "penalty";
    case Branch::none:
      break;
  }
  return "none";
}

MechanismInit init_mechanism(const TransitionEstimate& estimate, const PayoffRange& range,
                             const MechanismParams& params) {
  if (!(params.omega1 > 0.0 && params.omega2 > 0.0)) throw ConfigurationError("omega1 and omega2 must be > 0");
  if (!(range.lo <= range.hi)) {
    throw ConfigurationError(fmt::format("empty payoff range [{}, {}]", range.lo, range.hi));
  }
  MechanismInit out;
  out.state.params = params;
  out.state.range = range;
  out.state.kappa = estimate.probabilities().col(estimate.eta1()).mean();
  out.initial_target = out.state.kappa * (range.hi - range.lo) + range.lo;
  return out;
}

bool classify_early_bird(const TransitionEstimate& estimate, int rho) {
  const int top = estimate.eta1();
  if (rho < 0 || rho > top) throw DomainError(fmt::format("miner level {} outside 0..{}", rho, top));
  const auto row = estimate.probabilities().row(rho);
  return row[top] >= row.head(top).maxCoeff();
}

RoundTarget mechanism_round_target(const MechanismState& state, const TransitionEstimate& estimate, int rho) {
  RoundTarget out{state};
  const double p = estimate.probability(rho, estimate.eta1());
  const auto& prm = state.params;
  double e = 0.0;
  if (classify_early_bird(estimate, rho)) {
    out.branch = Branch::reward;
    out.state.kappa = std::min(prm.kappa_cap, (1.0 + p) * state.kappa);
    e = state.range.hi / (1.0 + std::exp(-prm.omega1 * out.state.kappa));
  } else {
    out.branch = Branch::penalty;
    out.state.kappa = std::min(prm.kappa_cap, (1.0 + 1.0 / p) * state.kappa);
    e = state.range.lo * (1.0 / (1.0 + std::exp(std::min(700.0, prm.omega2 * out.state.kappa))) + 1.0);
  }
  out.target = std::clamp(e, state.range.lo, state.range.hi);
  out.clamped = out.target != e;
  out.state.last_clamped = out.clamped;
  out.state.last_miner_level = rho;
  out.state.round_index = state.round_index + 1;
  return out;
}

}  // namespace feegame
