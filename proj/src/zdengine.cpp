#include "feegame/zdengine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/core.h>

#include "feegame/errors.hpp"

namespace feegame {

StrategyGrid::StrategyGrid(int eta1, int eta2, double max_fee) : eta1_(eta1), eta2_(eta2), max_fee_(max_fee) {
  if (eta1 < 1 || eta2 < 1) {
    throw ConfigurationError(fmt::format("grid partitions must be >= 1 (eta1={}, eta2={})", eta1, eta2));
  }
  if (!(max_fee > 0.0)) throw ConfigurationError(fmt::format("grid max_fee must be > 0 (got {})", max_fee));
}

double StrategyGrid::miner_value(int a) const {
  if (a < 0 || a > eta1_) throw DomainError(fmt::format("miner level {} outside 0..{}", a, eta1_));
  return a == eta1_ ? 1.0 : static_cast<double>(a) / eta1_;
}

double StrategyGrid::fee_value(int s) const {
  if (s < 0 || s > eta2_) throw DomainError(fmt::format("fee level {} outside 0..{}", s, eta2_));
  return s == eta2_ ? max_fee_ : max_fee_ * s / eta2_;
}

PayoffTables make_payoff_tables(const StrategyGrid& grid, const SidePayoffModel& model) {
  if (grid.max_fee() != model.params.max_fee) {
    throw ConfigurationError(
        fmt::format("grid max_fee {} differs from model max_fee {}", grid.max_fee(), model.params.max_fee));
  }
  PayoffTables t{grid, Eigen::VectorXd(grid.outcomes()), Eigen::VectorXd(grid.outcomes())};
  for (int a = 0; a <= grid.eta1(); ++a) {
    for (int b = 0; b <= grid.eta2(); ++b) {
      const int i = grid.outcome_index(a, b);
      t.miner[i] = miner_side_payoff(model, grid.miner_value(a), grid.fee_value(b));
      t.user[i] = user_side_payoff(model, grid.miner_value(a), grid.fee_value(b));
    }
  }
  return t;
}

namespace {

void check_row_stochastic(const Eigen::MatrixXd& m, double tol, const char* what) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (m.row(i).minCoeff() < -tol || m.row(i).maxCoeff() > 1.0 + tol) {
      throw DomainError(fmt::format("{}: row {} has an entry outside [0,1]", what, i));
    }
    const double sum = m.row(i).sum();
    if (std::abs(sum - 1.0) > tol) throw DomainError(fmt::format("{}: row {} sums to {}", what, i, sum));
  }
}

}  // namespace

void UserPolicy::validate(double tol) const {
  if (q.rows() != grid.outcomes() || q.cols() != grid.fee_levels()) {
    throw ConfigurationError(fmt::format("user policy is {}x{}, grid needs {}x{}", q.rows(), q.cols(),
                                         grid.outcomes(), grid.fee_levels()));
  }
  check_row_stochastic(q, tol, "user policy");
}

void MinerPolicy::validate(double tol) const {
  if (p.rows() != grid.fee_levels() || p.cols() != grid.miner_levels()) {
    throw ConfigurationError(fmt::format("miner policy is {}x{}, grid needs {}x{}", p.rows(), p.cols(),
                                         grid.fee_levels(), grid.miner_levels()));
  }
  check_row_stochastic(p, tol, "miner policy");
}

UserPolicy uniform_user_policy(const StrategyGrid& grid) {
  return {grid, Eigen::MatrixXd::Constant(grid.outcomes(), grid.fee_levels(), 1.0 / grid.fee_levels())};
}

MinerPolicy uniform_miner_policy(const StrategyGrid& grid) {
  return {grid, Eigen::MatrixXd::Constant(grid.fee_levels(), grid.miner_levels(), 1.0 / grid.miner_levels())};
}

Eigen::MatrixXd build_transition_matrix(const UserPolicy& q, const MinerPolicy& p) {
  if (!(q.grid == p.grid)) throw ConfigurationError("user and miner policies live on different grids");
  q.validate();
  p.validate();
  const StrategyGrid& g = q.grid;
  const int n = g.outcomes();
  Eigen::MatrixXd gamma(n, n);
  for (int i = 0; i < n; ++i) {
    for (int r = 0; r <= g.eta1(); ++r) {
      for (int s = 0; s <= g.eta2(); ++s) gamma(i, g.outcome_index(r, s)) = q.q(i, s) * p.p(s, r);
    }
  }
  return gamma;
}

namespace {

Eigen::VectorXd solve_direct(const Eigen::MatrixXd& gamma, bool& singular) {
  const Eigen::Index n = gamma.rows();
  // sigma^T (Gamma - I) = 0 with the last equation swapped for sum(sigma) = 1.
  Eigen::MatrixXd a = gamma.transpose() - Eigen::MatrixXd::Identity(n, n);
  a.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs[n - 1] = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  lu.setThreshold(1e-10);
  singular = !lu.isInvertible();
  if (singular) return {};
  return lu.solve(rhs);
}

Eigen::VectorXd tidy(Eigen::VectorXd sigma) {
  sigma = sigma.cwiseMax(0.0);
  return sigma / sigma.sum();
}

}  // namespace

StationaryResult stationary_distribution(const Eigen::MatrixXd& matrix, const StationaryOptions& options) {
  if (matrix.rows() == 0 || matrix.rows() != matrix.cols()) {
    throw DomainError(fmt::format("transition matrix must be square and non-empty ({}x{})", matrix.rows(),
                                  matrix.cols()));
  }
  check_row_stochastic(matrix, 1e-9, "transition matrix");

  const Eigen::Index n = matrix.rows();
  const double delta = options.damping;
  auto damped = [&] {
    return ((1.0 - delta) * matrix).array() + delta / static_cast<double>(n);
  };

  StationaryResult out;
  if (options.method == StationaryMethod::direct) {
    bool singular = false;
    Eigen::VectorXd sigma = solve_direct(matrix, singular);
    if (singular) {
      out.damped = true;
      out.damping = delta;
      sigma = solve_direct(damped().matrix(), singular);
      if (singular) throw ConvergenceError("stationary solve failed even after damping");
    }
    out.sigma = tidy(sigma);
  } else {
    const Eigen::MatrixXd g = damped().matrix();
    Eigen::RowVectorXd sigma = Eigen::RowVectorXd::Constant(n, 1.0 / static_cast<double>(n));
    long it = 0;
    for (;; ++it) {
      if (it >= options.max_iterations) {
        throw ConvergenceError(fmt::format("power iteration did not converge in {} steps", options.max_iterations));
      }
      Eigen::RowVectorXd next = sigma * g;
      const double change = (next - sigma).cwiseAbs().maxCoeff();
      sigma = next;
      if (change < options.tolerance) break;
    }
    out.sigma = tidy(sigma.transpose());
    out.damped = true;
    out.damping = delta;
    out.iterations = it + 1;
  }
  out.residual = (out.sigma.transpose() * matrix - out.sigma.transpose()).cwiseAbs().maxCoeff();
  return out;
}

ExpectedPayoffs expected_payoffs(const Eigen::VectorXd& sigma, const PayoffTables& tables) {
  if (sigma.size() != tables.miner.size() || sigma.size() != tables.user.size()) {
    throw ConfigurationError(fmt::format("distribution has {} entries, payoff tables have {}", sigma.size(),
                                         tables.miner.size()));
  }
  return {sigma.dot(tables.miner), sigma.dot(tables.user)};
}

PayoffRange controllable_payoff_range(const PayoffTables& tables) {
  const StrategyGrid& g = tables.grid;
  return {tables.miner[g.outcome_index(0, 0)], tables.miner[g.outcome_index(g.eta1(), g.eta2())]};
}

double zd_mean_fee_fraction(const PayoffTables& tables, const ZDCoefficients& c, int outcome) {
  const int b = tables.grid.outcome_levels(outcome).second;
  return static_cast<double>(b) / tables.grid.eta2() + c.alpha * tables.miner[outcome] +
         c.beta * tables.user[outcome] + c.gamma;
}

namespace {

void fill_row(Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row, double mean, ResidualRule rule) {
  const Eigen::Index top = row.size() - 1;
  row.setZero();
  if (rule == ResidualRule::zero) {
    row[top] = mean;
    row[0] = 1.0 - mean;
    return;
  }
  const double levels = static_cast<double>(row.size());
  if (mean >= 0.5) {
    const double w = 2.0 * (1.0 - mean);
    row.setConstant(w / levels);
    row[top] += 1.0 - w;
  } else {
    const double w = 2.0 * mean;
    row.setConstant(w / levels);
    row[0] += 1.0 - w;
  }
}

}  // namespace

UserPolicy zd_policy_from_coefficients(const PayoffTables& tables, const ZDCoefficients& c, ResidualRule rule) {
  const StrategyGrid& g = tables.grid;
  UserPolicy out{g, Eigen::MatrixXd(g.outcomes(), g.fee_levels())};
  constexpr double slack = 1e-12;
  for (int i = 0; i < g.outcomes(); ++i) {
    const double m = zd_mean_fee_fraction(tables, c, i);
    if (m < -slack || m > 1.0 + slack) {
      throw DomainError(fmt::format("coefficients need mean fee fraction {} after outcome {}", m, i));
    }
    fill_row(out.q.row(i), std::clamp(m, 0.0, 1.0), rule);
  }
  return out;
}

ZDPolicy zd_user_policy(const PayoffTables& tables, double target, ResidualRule rule) {
  const PayoffRange range = controllable_payoff_range(tables);
  const double scale = std::max(1.0, tables.miner.cwiseAbs().maxCoeff());
  if (range.hi - range.lo <= 1e-12 * scale) {
    throw DegenerateTargetError(
        fmt::format("controllable range [{}, {}] collapses to a point", range.lo, range.hi));
  }
  if (!(range.lo <= target && target <= range.hi)) {
    throw InfeasibleTargetError(
        fmt::format("target payoff {} outside the controllable range [{}, {}]", target, range.lo, range.hi),
        range.lo, range.hi);
  }
  const StrategyGrid& g = tables.grid;

  // Every row needs 0 <= b/eta2 + alpha * (S_M - target) <= 1.
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.outcomes(); ++i) {
    const double c = static_cast<double>(g.outcome_levels(i).second) / g.eta2();
    const double d = tables.miner[i] - target;
    if (std::abs(d) <= 1e-13 * scale) continue;
    double l = -c / d;
    double h = (1.0 - c) / d;
    if (d < 0) std::swap(l, h);
    lo = std::max(lo, l);
    hi = std::min(hi, h);
  }
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) {
    throw DegenerateTargetError(fmt::format("no usable ZD coefficient for target {}", target));
  }
  const double alpha = std::abs(lo) > std::abs(hi) ? lo : hi;
  if (std::abs(alpha) <= 1e-12) {
    throw DegenerateTargetError(fmt::format("only alpha ~ 0 is feasible for target {}", target));
  }
  ZDCoefficients coeffs{alpha, 0.0, -alpha * target};
  return {zd_policy_from_coefficients(tables, coeffs, rule), coeffs};
}

double verify_linear_relation(const UserPolicy& q, const ZDCoefficients& c, const MinerPolicy& p,
                              const PayoffTables& tables, const StationaryOptions& options) {
  const StationaryResult st = stationary_distribution(build_transition_matrix(q, p), options);
  const ExpectedPayoffs e = expected_payoffs(st.sigma, tables);
  return std::abs(c.alpha * e.miner + c.beta * e.user + c.gamma);
}

}  // namespace feegame
