#include "feegame/agents.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "feegame/errors.hpp"

namespace feegame {

EvolutionaryMiner::EvolutionaryMiner(const StrategyGrid& grid, double p_earliest, int window)
    : grid_(grid),
      p_(p_earliest),
      window_(window),
      residual_(Eigen::VectorXd::Constant(grid.eta1(), 1.0 / grid.eta1())),
      own_counts_(Eigen::VectorXd::Zero(grid.miner_levels())),
      fee_counts_(Eigen::VectorXd::Zero(grid.fee_levels())) {
  if (!(p_earliest >= 0.0 && p_earliest <= 1.0)) {
    throw ConfigurationError(fmt::format("initial earliest-start probability {} outside [0,1]", p_earliest));
  }
  if (window < 0) throw ConfigurationError(fmt::format("frequency window must be >= 0 (got {})", window));
}

Eigen::VectorXd EvolutionaryMiner::mixed_strategy() const {
  Eigen::VectorXd out(grid_.miner_levels());
  out.head(grid_.eta1()) = (1.0 - p_) * residual_;
  out[grid_.eta1()] = p_;
  return out;
}

namespace {

Eigen::VectorXd normalized(const Eigen::VectorXd& counts) {
  const double total = counts.sum();
  if (total <= 0.0) return Eigen::VectorXd::Zero(counts.size());
  return counts / total;
}

}  // namespace

Eigen::VectorXd EvolutionaryMiner::own_frequency() const { return normalized(own_counts_); }
Eigen::VectorXd EvolutionaryMiner::fee_frequency() const { return normalized(fee_counts_); }

void EvolutionaryMiner::push(std::deque<int>& hist, Eigen::VectorXd& counts, int level, int window) {
  counts[level] += 1.0;
  if (window == 0) return;
  hist.push_back(level);
  if (static_cast<int>(hist.size()) > window) {
    counts[hist.front()] -= 1.0;
    hist.pop_front();
  }
}

void EvolutionaryMiner::record_own(int level) {
  if (level < 0 || level > grid_.eta1()) throw DomainError(fmt::format("miner level {} out of range", level));
  push(own_hist_, own_counts_, level, window_);
  ++rounds_;
}

void EvolutionaryMiner::record_fee(int level) {
  if (level < 0 || level > grid_.eta2()) throw DomainError(fmt::format("fee level {} out of range", level));
  push(fee_hist_, fee_counts_, level, window_);
}

void EvolutionaryMiner::set_p_earliest(double p) {
  // Residual weights keep their proportions; with no residual mass left
  // there are no proportions to keep, so fall back to uniform.
  if (p_ >= 1.0) residual_.setConstant(1.0 / grid_.eta1());
  p_ = std::clamp(p, 0.0, 1.0);
}

MinerValues miner_strategy_values(const EvolutionaryMiner& miner, const PayoffTables& tables) {
  if (miner.fee_frequency().sum() <= 0.0) throw NotReadyError("miner has not observed any fee yet");
  const StrategyGrid& g = tables.grid;
  if (!(g == miner.grid())) throw ConfigurationError("miner and payoff tables use different grids");
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> sm(tables.miner.data(), g.miner_levels(), g.fee_levels());
  MinerValues v;
  v.w = sm * miner.fee_frequency();
  v.w_e = v.w[g.eta1()];
  v.e_m = miner.own_frequency().dot(v.w);
  return v;
}

bool evolutionary_update(EvolutionaryMiner& miner, double w_e, double e_m) {
  if (!(e_m > 0.0)) return false;
  miner.set_p_earliest(miner.p_earliest() * w_e / e_m);
  return true;
}

int sample_miner_level(EvolutionaryMiner& miner, Rng& rng) {
  const int top = miner.grid().eta1();
  int level = top;
  if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) >= miner.p_earliest()) {
    const Eigen::VectorXd& w = miner.residual();
    std::discrete_distribution<int> pick(w.data(), w.data() + w.size());
    level = pick(rng);
  }
  miner.record_own(level);
  return level;
}

void ControlledValues::anchor(const Eigen::VectorXd& base, const Eigen::VectorXd& f, double target) {
  w_ = base.array() + (target - f.dot(base));
}

void ControlledValues::attribute(Branch branch, const Eigen::VectorXd& f, double target) {
  if (!anchored()) throw NotReadyError("controlled values used before anchoring");
  const Eigen::Index top = w_.size() - 1;
  const double fe = f[top];
  const double rest = f.head(top).dot(w_.head(top));
  if (branch == Branch::reward && fe > 0.0) {
    w_[top] = (target - rest) / fe;
  } else if (branch == Branch::penalty && fe < 1.0) {
    w_.head(top).array() += (target - fe * w_[top] - rest) / (1.0 - fe);
  }
}

std::string to_string(UserKind k) {
  switch (k) {
    case UserKind::zd:
      return "zd";
    case UserKind::all_c:
      return "all_c";
    case UserKind::all_d:
      return "all_d";
    case UserKind::wsls:
      return "wsls";
    case UserKind::tft:
      return "tft";
    case UserKind::random:
      return "random";
  }
  return "zd";
}

UserKind parse_user_kind(const std::string& text) {
  for (UserKind k : {UserKind::zd, UserKind::all_c, UserKind::all_d, UserKind::wsls, UserKind::tft, UserKind::random}) {
    if (to_string(k) == text) return k;
  }
  throw ConfigurationError("unknown user kind '" + text + "' (zd, all_c, all_d, wsls, tft, random)");
}

UserBaseline::UserBaseline(UserKind kind, const StrategyGrid& grid, double q0, std::optional<double> aspiration)
    : kind_(kind), grid_(grid), q0_(q0), fixed_aspiration_(aspiration) {
  if (kind == UserKind::zd) throw ConfigurationError("the ZD user is driven by the mechanism, not a baseline");
  if (!(q0 >= 0.0 && q0 <= 1.0)) throw ConfigurationError(fmt::format("initial user probability {} outside [0,1]", q0));
}

double UserBaseline::aspiration() const {
  if (fixed_aspiration_) return *fixed_aspiration_;
  return payoff_count_ > 0 ? payoff_sum_ / static_cast<double>(payoff_count_) : 0.0;
}

void UserBaseline::record(int fee_level, int miner_level, double payoff) {
  last_fee_ = fee_level;
  last_miner_ = miner_level;
  last_payoff_ = payoff;
  payoff_sum_ += payoff;
  ++payoff_count_;
}

int baseline_fee(const UserBaseline& b, Rng& rng) {
  const int top = b.grid_.eta2();
  auto coin = [&] { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < b.q0_; };
  switch (b.kind_) {
    case UserKind::all_c:
      return top;
    case UserKind::all_d:
      return 0;
    case UserKind::random:
      return std::uniform_int_distribution<int>(0, top)(rng);
    case UserKind::wsls:
      if (!b.started()) return coin() ? top : 0;
      return b.last_payoff_ >= b.aspiration() ? b.last_fee_ : top - b.last_fee_;
    case UserKind::tft:
      if (!b.started()) return coin() ? top : 0;
      return top - static_cast<int>(std::lround(static_cast<double>(b.last_miner_) * top / b.grid_.eta1()));
    case UserKind::zd:
      break;
  }
  throw ConfigurationError("baseline_fee called for the ZD user");
}

}  // namespace feegame
