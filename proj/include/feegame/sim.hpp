#pragma once

// Episodes of the miner-side / user-side game: a preliminary estimation
// phase followed by the mechanism phase, repeated and aggregated.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "feegame/agents.hpp"
#include "feegame/mechanism.hpp"
#include "feegame/payoff.hpp"
#include "feegame/zdengine.hpp"

namespace feegame {

// analytic: the miner's update consumes the mechanism's pinned payoff.
// sampled:  the miner's update consumes its frequency-weighted values.
enum class PlayMode { analytic, sampled };

std::string to_string(PlayMode m);
PlayMode parse_play_mode(const std::string& text);
std::string to_string(ResidualRule r);
ResidualRule parse_residual_rule(const std::string& text);

struct SimConfig {
  int eta1 = 10;
  int eta2 = 10;
  SidePayoffModel model;
  int rounds_prelim = 100;
  int rounds_main = 200;
  int repeats = 50;
  std::uint64_t seed = 1;
  UserKind user = UserKind::zd;
  PlayMode play_mode = PlayMode::analytic;
  double miner_p0 = 0.5;
  double user_q0 = 0.7;
  int frequency_window = 0;
  std::optional<double> wsls_aspiration;
  double smoothing = 1.0;
  MechanismParams mechanism;
  ResidualRule residual_rule = ResidualRule::zero;
  int threads = 0;  // 0: hardware concurrency

  StrategyGrid grid() const { return {eta1, eta2, model.params.max_fee}; }
  // ConfigurationError on the first violated constraint.
  void validate() const;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

enum class Phase { prelim, main };

struct RoundRecord {
  int round = 0;
  Phase phase = Phase::prelim;
  int fee_level = 0;
  int miner_level = 0;
  double fee = 0.0;
  double s_m = 0.0;
  double s_u = 0.0;
  std::optional<double> e_target;
  Branch branch = Branch::none;
  double p_e = 0.0;
  std::optional<double> kappa;
  double start_time = 0.0;
  // The miner-side's expected payoff this round: the pinned target under
  // the mechanism, the frequency-weighted E_m otherwise.
  std::optional<double> expected_miner_payoff;
  bool target_clamped = false;
  bool update_skipped = false;
};

struct RunSummary {
  double final_p_e = 0.0;
  double final_mean_fee = 0.0;         // over the last 20 main rounds
  double final_mean_start_time = 0.0;  // same window
  double upsilon_m = 0.0;
};

struct SimTrace {
  std::uint64_t config_hash = 0;
  int run = 0;
  std::vector<RoundRecord> records;
  RunSummary summary;
};

SimTrace run_episode(const SimConfig& config, Rng& rng, int run_index = 0);

// Mean of the per-round expected miner payoff over the main phase.
// NotReadyError when the trace has no main-phase round.
double long_run_average_payoff(const SimTrace& trace);

struct AggregateRow {
  int round = 0;
  std::string metric;
  double mean = 0.0;
  double std = 0.0;
};

struct ExperimentResult {
  std::vector<SimTrace> traces;
  std::vector<AggregateRow> aggregate;
};

// Aggregated metrics: p_e, fee, fee_level, miner_level, start_time, s_m, s_u,
// e_target, kappa (the last two over main rounds only).
std::vector<AggregateRow> aggregate_traces(const std::vector<SimTrace>& traces);

// Mean of `metric` per round across traces.
std::vector<double> mean_series(const std::vector<AggregateRow>& rows, const std::string& metric);

// Runs `repeats` episodes, episode k seeded with seed + k, in parallel.
// The result does not depend on the thread count.
ExperimentResult run_experiment(const SimConfig& config);

std::uint64_t fnv1a(const std::string& text);

}  // namespace feegame
