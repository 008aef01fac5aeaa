#include "feegame/incircle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/core.h>

#include "feegame/errors.hpp"
#include "feegame/quadrature.hpp"

namespace feegame {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::step:
      return "step";
    case Activation::logistic:
      return "logistic";
    case Activation::constant_partials:
      return "constant_partials";
  }
  return "step";
}

Activation parse_activation(const std::string& text) {
  for (Activation a : {Activation::step, Activation::logistic, Activation::constant_partials}) {
    if (to_string(a) == text) return a;
  }
  throw ConfigurationError("unknown activation '" + text + "' (step, logistic, constant_partials)");
}

void MiningSystemModel::validate() const {
  if (!(lambda > 0.0)) throw ModelError(fmt::format("lambda must be > 0 (got {})", lambda));
  if (!(round_duration > 0.0)) throw ModelError("round duration must be > 0");
  if (!(max_fee > 0.0)) throw ModelError("max fee must be > 0");
  if (!(eps_m > 0 && sig_m > 0 && eps_u > 0 && sig_u > 0)) throw ModelError("eps/sig scales must be > 0");
  if (!(fee_cost_slope > 0.0)) throw ModelError("fee cost slope must be > 0");
  if (!(subsidy >= 0.0 && cost_rate >= 0.0)) throw ModelError("subsidy and cost rate must be >= 0");
  if (activation == Activation::logistic && !(sharpness > 0.0)) throw ModelError("sharpness must be > 0");
  if (activation == Activation::constant_partials) {
    const auto& p = partials;
    if (!(p.base_rate > 0.0)) throw ModelError("constant-partials base_rate must be > 0");
    if (!(p.base_activity >= 0 && p.a >= 0 && p.d >= 0 && p.base_cost >= 0 && p.g >= 0)) {
      throw ModelError("constant partials must be >= 0");
    }
  }
  for (double x : miner_strategies) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError(fmt::format("miner strategy {} outside [0,1]", x));
  }
  for (double y : user_fees) {
    if (!(y >= 0.0 && y <= max_fee)) throw DomainError(fmt::format("user fee {} outside [0,{}]", y, max_fee));
  }
}

namespace {

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double sum_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double e : v) s += e;
  return s;
}

void check_miner(const MiningSystemModel& m, std::size_t i) {
  if (m.n_miners() == 0) throw ModelError("the system has no miners");
  if (i >= m.n_miners()) throw DomainError(fmt::format("miner index {} out of range", i));
}

}  // namespace

double start_time(const MiningSystemModel& m, std::size_t i) {
  return (1.0 - m.miner_strategies[i]) * m.round_duration;
}

double miner_activity(const MiningSystemModel& m, std::size_t i, double t) {
  switch (m.activation) {
    case Activation::step:
      return t >= start_time(m, i) ? 1.0 : 0.0;
    case Activation::logistic:
      return 1.0 / (1.0 + std::exp(-m.sharpness * (t - start_time(m, i))));
    case Activation::constant_partials:
      return m.partials.base_activity + m.partials.a * m.miner_strategies[i];
  }
  return 0.0;
}

double active_rigs(const MiningSystemModel& m, double t) {
  double total = 0.0;
  for (std::size_t i = 0; i < m.n_miners(); ++i) total += miner_activity(m, i, t);
  return total;
}

double miner_active_time(const MiningSystemModel& m, std::size_t i, double t) {
  const double ti = start_time(m, i);
  switch (m.activation) {
    case Activation::step:
      return std::max(0.0, t - ti);
    case Activation::logistic:
      return (softplus(m.sharpness * (t - ti)) - softplus(-m.sharpness * ti)) / m.sharpness;
    case Activation::constant_partials:
      return m.partials.base_rate * t / static_cast<double>(m.n_miners()) + m.partials.d * m.miner_strategies[i];
  }
  return 0.0;
}

double aggregate_duration(const MiningSystemModel& m, double t) {
  if (m.activation == Activation::constant_partials) {
    return m.partials.base_rate * t + m.partials.d * sum_of(m.miner_strategies);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < m.n_miners(); ++i) total += miner_active_time(m, i, t);
  return total;
}

double mining_cost(const MiningSystemModel& m, std::size_t i, double t) {
  if (m.activation == Activation::constant_partials) {
    return m.partials.base_cost * t + m.partials.g * m.miner_strategies[i];
  }
  return m.cost_rate * miner_active_time(m, i, t);
}

double block_time_density(const MiningSystemModel& m, double t) {
  return m.lambda * active_rigs(m, t) * std::exp(-m.lambda * aggregate_duration(m, t));
}

double integration_horizon(const MiningSystemModel& m, double tail) {
  auto small_enough = [&](double h) { return std::exp(-m.lambda * aggregate_duration(m, h)) < tail; };
  double hi = std::max(1.0, m.round_duration);
  while (!small_enough(hi)) {
    hi *= 2.0;
    if (hi > 1e12) throw ModelError("block time tail never vanishes (no rig ever becomes active)");
  }
  double lo = 0.0;
  for (int k = 0; k < 80 && hi - lo > 1e-9 * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    (small_enough(mid) ? hi : lo) = mid;
  }
  return hi;
}

std::vector<double> breakpoints(const MiningSystemModel& m, double horizon) {
  std::vector<double> out;
  if (m.activation == Activation::constant_partials) return out;
  for (std::size_t i = 0; i < m.n_miners(); ++i) {
    const double ti = start_time(m, i);
    out.push_back(ti);
    if (m.activation == Activation::logistic) {
      for (double k : {-8.0, -2.0, 2.0, 8.0}) out.push_back(ti + k / m.sharpness);
    }
  }
  std::erase_if(out, [&](double t) { return !(t > 0.0 && t < horizon); });
  return out;
}

double block_probability(const MiningSystemModel& m, double horizon) {
  return piecewise_integral([&](double t) { return block_time_density(m, t); }, 0.0, horizon,
                            breakpoints(m, horizon), 1e-12);
}

double miner_expected_payoff(const MiningSystemModel& m, std::size_t i, double horizon) {
  check_miner(m, i);
  const double value = m.subsidy + sum_of(m.user_fees);
  // (alpha_i / alpha_I) f_B = lambda alpha_i e^{-lambda tau}, which is also 0 when alpha_I = 0.
  auto integrand = [&](double t) {
    const double decay = m.lambda * std::exp(-m.lambda * aggregate_duration(m, t));
    return (m.eps_m * miner_activity(m, i, t) * value - m.sig_m * mining_cost(m, i, t) * active_rigs(m, t)) * decay;
  };
  return piecewise_integral(integrand, 0.0, horizon, breakpoints(m, horizon), 1e-12);
}

double miner_expected_payoff(const MiningSystemModel& m, std::size_t i) {
  check_miner(m, i);
  m.validate();
  return miner_expected_payoff(m, i, integration_horizon(m));
}

double packaging_probability(const MiningSystemModel& m, std::size_t k) {
  if (k >= m.n_users()) throw DomainError(fmt::format("user index {} out of range", k));
  const double total = sum_of(m.user_fees);
  return total > 0.0 ? m.user_fees[k] / total : 0.0;
}

namespace {

double user_payoff_on(const MiningSystemModel& m, std::size_t k, double block_mass) {
  const double q = m.eps_u * m.user_value - m.sig_u * m.fee_cost_slope * m.user_fees[k];
  return q * packaging_probability(m, k) * block_mass;
}

}  // namespace

UserPayoff user_expected_payoff(const MiningSystemModel& m, std::size_t k) {
  if (k >= m.n_users()) throw DomainError(fmt::format("user index {} out of range", k));
  m.validate();
  if (sum_of(m.user_fees) <= 0.0) return {0.0, true};
  if (m.n_miners() == 0) throw ModelError("the system has no miners");
  return {user_payoff_on(m, k, block_probability(m, integration_horizon(m))), false};
}

bool SupermodularReport::condition_a_everywhere() const {
  return std::all_of(miner.begin(), miner.end(), [](const auto& p) { return p.condition_a; });
}

bool SupermodularReport::condition_b_everywhere() const {
  return std::all_of(miner.begin(), miner.end(), [](const auto& p) { return p.condition_b; });
}

bool SupermodularReport::user_condition_everywhere() const {
  return std::all_of(user.begin(), user.end(), [](const auto& p) { return p.condition; });
}

bool SupermodularReport::conditions_hold() const {
  return condition_a_everywhere() && condition_b_everywhere() && user_condition_everywhere();
}

bool SupermodularReport::mixed_partials_nonnegative() const {
  return min_mixed_partial >= -miner_tolerance && min_user_mixed_partial >= -user_tolerance;
}

std::string SupermodularReport::first_violation() const {
  for (const auto& p : miner) {
    if (!p.condition_a) return fmt::format("miner condition a fails at x=({}, {})", p.x_i, p.x_j);
    if (!p.condition_b) return fmt::format("miner condition b fails at x=({}, {})", p.x_i, p.x_j);
    if (p.mixed_partial < -miner_tolerance) {
      return fmt::format("miner mixed partial {} < 0 at x=({}, {})", p.mixed_partial, p.x_i, p.x_j);
    }
  }
  for (const auto& p : user) {
    if (!p.condition) return fmt::format("user condition fails at y=({}, {})", p.y_k, p.y_l);
    if (p.mixed_partial < -user_tolerance) {
      return fmt::format("user mixed partial {} < 0 at y=({}, {})", p.mixed_partial, p.y_k, p.y_l);
    }
  }
  return {};
}

namespace {

struct LocalPartials {
  std::vector<double> a;  // d alpha_I / d x_i
  std::vector<double> d;  // d tau / d x_j
  std::vector<double> g;  // d C_m(x_i) / d x_i
};

LocalPartials local_partials(const MiningSystemModel& m, std::size_t i, std::size_t j,
                             const std::vector<double>& times, double h) {
  LocalPartials out;
  MiningSystemModel up = m;
  MiningSystemModel down = m;
  up.miner_strategies[i] += h;
  down.miner_strategies[i] -= h;
  MiningSystemModel up_j = m;
  MiningSystemModel down_j = m;
  up_j.miner_strategies[j] += h;
  down_j.miner_strategies[j] -= h;
  for (double t : times) {
    out.a.push_back((active_rigs(up, t) - active_rigs(down, t)) / (2 * h));
    out.d.push_back((aggregate_duration(up_j, t) - aggregate_duration(down_j, t)) / (2 * h));
    out.g.push_back((mining_cost(up, i, t) - mining_cost(down, i, t)) / (2 * h));
  }
  return out;
}

double mixed_partial(const MiningSystemModel& m, double horizon, double h) {
  auto at = [&](double di, double dj) {
    MiningSystemModel p = m;
    p.miner_strategies[0] += di;
    p.miner_strategies[1] += dj;
    return miner_expected_payoff(p, 0, horizon);
  };
  return (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
}

}  // namespace

SupermodularReport check_supermodular(const MiningSystemModel& model, const SupermodularOptions& options) {
  model.validate();
  if (options.grid_resolution < 3) {
    throw PreconditionError(fmt::format("grid resolution must be >= 3 (got {})", options.grid_resolution));
  }
  if (options.time_samples < 2) throw PreconditionError("need at least 2 time samples");
  if (model.n_miners() < 2 || model.n_users() < 2) {
    throw PreconditionError("supermodularity checks need at least two miners and two users");
  }

  SupermodularReport report;
  MiningSystemModel work = model;
  if (work.activation == Activation::step) {
    work.activation = Activation::logistic;
    report.used_surrogate = true;
  }
  const int res = options.grid_resolution;
  const double h = options.partial_step;

  report.min_mixed_partial = std::numeric_limits<double>::infinity();
  double scale = 1.0;
  for (int u = 0; u < res; ++u) {
    for (int v = 0; v < res; ++v) {
      MinerGridPoint pt;
      pt.x_i = (u + 0.5) / res;
      pt.x_j = (v + 0.5) / res;
      MiningSystemModel m = work;
      m.miner_strategies[0] = pt.x_i;
      m.miner_strategies[1] = pt.x_j;
      const double horizon = integration_horizon(m);
      std::vector<double> times;
      for (int k = 0; k < options.time_samples; ++k) times.push_back(horizon * k / (options.time_samples - 1));

      pt.condition_a = pt.condition_b = true;
      for (auto [i, j] : {std::pair<std::size_t, std::size_t>{0, 1}, {1, 0}}) {
        const LocalPartials lp = local_partials(m, i, j, times, h);
        for (std::size_t k = 0; k < times.size(); ++k) {
          const double alpha_i = miner_activity(m, i, times[k]);
          const double lhs_a = alpha_i * m.lambda * lp.d[k];
          const double cost_term = mining_cost(m, i, times[k]) * m.lambda * lp.d[k];
          const double slack = 1e-8 * (1.0 + std::abs(lhs_a) + std::abs(lp.a[k]));
          if (lhs_a - lp.a[k] < -slack) pt.condition_a = false;
          if (lp.g[k] - cost_term < -1e-8 * (1.0 + std::abs(lp.g[k]) + std::abs(cost_term))) pt.condition_b = false;
        }
      }
      pt.mixed_partial = mixed_partial(m, horizon, options.mixed_step);
      scale = std::max(scale, std::abs(miner_expected_payoff(m, 0, horizon)));
      report.min_mixed_partial = std::min(report.min_mixed_partial, pt.mixed_partial);
      report.miner.push_back(pt);
    }
  }
  report.miner_tolerance = options.relative_tolerance * scale;

  report.min_user_mixed_partial = std::numeric_limits<double>::infinity();
  double user_scale = 1.0;
  const double mass = block_probability(work, integration_horizon(work));
  const double hy = options.mixed_step * work.max_fee;
  for (int u = 0; u < res; ++u) {
    for (int v = 0; v < res; ++v) {
      UserGridPoint pt;
      pt.y_k = work.max_fee * (u + 1) / res;
      pt.y_l = work.max_fee * (v + 1) / res;
      MiningSystemModel m = work;
      m.user_fees[0] = pt.y_k;
      m.user_fees[1] = pt.y_l;
      const double total = sum_of(m.user_fees);
      const double others = total - pt.y_k;
      const double sw = m.sig_u * m.fee_cost_slope;
      const double q = m.eps_u * m.user_value - sw * pt.y_k;
      const double lhs = q * (pt.y_k - others) + total * pt.y_k * sw;
      pt.condition = lhs >= -1e-10 * (1.0 + std::abs(q * (pt.y_k - others)) + total * pt.y_k * sw);
      pt.closed_form = mass * (q * (pt.y_k - others) / (total * total * total) + pt.y_k * sw / (total * total));

      auto at = [&](double dk, double dl) {
        MiningSystemModel p = m;
        p.user_fees[0] += dk;
        p.user_fees[1] += dl;
        return user_payoff_on(p, 0, mass);
      };
      pt.mixed_partial = (at(hy, hy) - at(hy, -hy) - at(-hy, hy) + at(-hy, -hy)) / (4 * hy * hy);
      user_scale = std::max(user_scale, std::abs(user_payoff_on(m, 0, mass)));
      report.min_user_mixed_partial = std::min(report.min_user_mixed_partial, pt.mixed_partial);
      report.user.push_back(pt);
    }
  }
  report.user_tolerance = options.relative_tolerance * user_scale;
  return report;
}

BestResponseTrajectory best_response_dynamics(const MiningSystemModel& model, int max_iters, int levels) {
  model.validate();
  if (max_iters < 1) throw PreconditionError("max_iters must be >= 1");
  if (levels < 2) throw PreconditionError("best responses need at least 2 strategy levels");
  if (model.n_miners() == 0) throw ModelError("the system has no miners");

  BestResponseTrajectory out;
  out.profiles.push_back(model.miner_strategies);
  for (int it = 0; it < max_iters; ++it) {
    const std::vector<double>& current = out.profiles.back();
    std::vector<double> next = current;
    for (std::size_t i = 0; i < model.n_miners(); ++i) {
      MiningSystemModel m = model;
      m.miner_strategies = current;
      auto payoff_at = [&](double x) {
        m.miner_strategies[i] = x;
        return miner_expected_payoff(m, i);
      };
      std::vector<double> values;
      double best = -std::numeric_limits<double>::infinity();
      for (int k = 0; k < levels; ++k) {
        values.push_back(payoff_at(static_cast<double>(k) / (levels - 1)));
        best = std::max(best, values.back());
      }
      const double tie = 1e-10 * std::max(1.0, std::abs(best));
      if (payoff_at(current[i]) >= best - tie) continue;
      for (int k = levels - 1; k >= 0; --k) {
        if (values[k] >= best - tie) {
          next[i] = static_cast<double>(k) / (levels - 1);
          break;
        }
      }
    }
    const bool fixed = next == current;
    out.profiles.push_back(std::move(next));
    if (fixed) {
      out.converged = true;
      break;
    }
  }
  return out;
}

GapProfile mining_gap_profile(const MiningSystemModel& m, int time_resolution) {
  m.validate();
  if (time_resolution < 2) throw PreconditionError("gap profile needs at least 2 time samples");
  GapProfile out;
  const double fees = sum_of(m.user_fees);
  std::vector<double> ts;
  std::vector<double> gap;
  for (int k = 0; k < time_resolution; ++k) {
    GapSample s;
    s.t = m.round_duration * k / (time_resolution - 1);
    s.income = m.eps_m * m.lambda * (m.subsidy + fees * s.t / m.round_duration);
    s.cost = m.sig_m * m.cost_rate;
    s.in_gap = s.income < s.cost;
    ts.push_back(s.t);
    gap.push_back(s.in_gap ? 1.0 : 0.0);
    out.samples.push_back(s);
  }
  out.gap_length = trapezoid_samples(ts, gap);
  return out;
}

}  // namespace feegame
