#pragma once

// Evolutionary miner-side and the classical user-side baselines.

#include <deque>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "feegame/mechanism.hpp"
#include "feegame/zdengine.hpp"

namespace feegame {

using Rng = std::mt19937_64;

// Frequencies f (own levels) and g (observed fee levels) are cumulative
// unless `window` > 0, in which case only the last `window` rounds count.
class EvolutionaryMiner {
 public:
  EvolutionaryMiner(const StrategyGrid& grid, double p_earliest, int window = 0);

  const StrategyGrid& grid() const { return grid_; }
  double p_earliest() const { return p_; }
  // Distribution over levels 0..eta1-1 used when the earliest level is not played.
  const Eigen::VectorXd& residual() const { return residual_; }
  Eigen::VectorXd mixed_strategy() const;

  Eigen::VectorXd own_frequency() const;
  Eigen::VectorXd fee_frequency() const;
  long rounds_seen() const { return rounds_; }
  int window() const { return window_; }

  void record_own(int level);
  void record_fee(int level);
  void set_p_earliest(double p);

 private:
  static void push(std::deque<int>& hist, Eigen::VectorXd& counts, int level, int window);

  StrategyGrid grid_;
  double p_;
  int window_;
  Eigen::VectorXd residual_;
  Eigen::VectorXd own_counts_;
  Eigen::VectorXd fee_counts_;
  std::deque<int> own_hist_;
  std::deque<int> fee_hist_;
  long rounds_ = 0;
};

struct MinerValues {
  Eigen::VectorXd w;  // W_r for r = 0..eta1
  double w_e = 0.0;
  double e_m = 0.0;
};

// W_r = sum_s g_s S_m(r mu1, s mu2), W_e = W_eta1, E_m = sum_r f_r W_r.
// NotReadyError before any fee was observed.
MinerValues miner_strategy_values(const EvolutionaryMiner& miner, const PayoffTables& tables);

// p <- clamp(p W_e / E_m, 0, 1). Returns false (state untouched) when E_m <= 0.
bool evolutionary_update(EvolutionaryMiner& miner, double w_e, double e_m);

// Draws a level and records it in the miner's own frequencies.
int sample_miner_level(EvolutionaryMiner& miner, Rng& rng);

// Strategy values whose frequency-weighted mean is pinned to the mechanism's
// target, for the analytic play mode.
class ControlledValues {
 public:
  // Shift `base` by a constant so that sum_r f_r W_r equals `target`.
  void anchor(const Eigen::VectorXd& base, const Eigen::VectorXd& f, double target);

  // Reward: W_e absorbs the whole difference to `target`.
  // Penalty: W_e is held and the other levels absorb it equally.
  void attribute(Branch branch, const Eigen::VectorXd& f, double target);

  bool anchored() const { return w_.size() > 0; }
  const Eigen::VectorXd& values() const { return w_; }
  double w_e() const { return w_[w_.size() - 1]; }

 private:
  Eigen::VectorXd w_;
};

enum class UserKind { zd, all_c, all_d, wsls, tft, random };

std::string to_string(UserKind k);
UserKind parse_user_kind(const std::string& text);

class UserBaseline {
 public:
  // `q0` is the probability that WSLS/TFT open with the highest fee.
  // Without a fixed aspiration WSLS compares against the running mean of
  // its own payoffs.
  UserBaseline(UserKind kind, const StrategyGrid& grid, double q0, std::optional<double> aspiration = {});

  UserKind kind() const { return kind_; }
  bool started() const { return last_fee_ >= 0; }
  int last_fee() const { return last_fee_; }
  int last_miner_level() const { return last_miner_; }
  double last_payoff() const { return last_payoff_; }
  double aspiration() const;

  void record(int fee_level, int miner_level, double payoff);

 private:
  friend int baseline_fee(const UserBaseline& b, Rng& rng);

  UserKind kind_;
  StrategyGrid grid_;
  double q0_;
  std::optional<double> fixed_aspiration_;
  int last_fee_ = -1;
  int last_miner_ = -1;
  double last_payoff_ = 0.0;
  double payoff_sum_ = 0.0;
  long payoff_count_ = 0;
};

int baseline_fee(const UserBaseline& b, Rng& rng);

}  // namespace feegame
