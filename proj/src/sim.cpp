#include "feegame/sim.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <thread>

#include <fmt/core.h>

#include "feegame/config.hpp"
#include "feegame/errors.hpp"

namespace feegame {

std::string to_string(PlayMode m) { return m == PlayMode::analytic ? "analytic" : "sampled"; }

PlayMode parse_play_mode(const std::string& text) {
  if (text == "analytic") return PlayMode::analytic;
  if (text == "sampled") return PlayMode::sampled;
  throw ConfigurationError("unknown play mode '" + text + "' (analytic, sampled)");
}

std::string to_string(ResidualRule r) { return r == ResidualRule::zero ? "zero" : "uniform"; }

ResidualRule parse_residual_rule(const std::string& text) {
  if (text == "zero") return ResidualRule::zero;
  if (text == "uniform") return ResidualRule::uniform;
  throw ConfigurationError("unknown residual rule '" + text + "' (zero, uniform)");
}

void SimConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigurationError(msg); };
  if (eta1 < 1 || eta2 < 1) fail("grid.eta1 and grid.eta2 must be >= 1");
  if (rounds_prelim < 1) fail("sim.rounds_prelim must be >= 1");
  if (rounds_main < 1) fail("sim.rounds_main must be >= 1");
  if (repeats < 1) fail("sim.repeats must be >= 1");
  if (threads < 0) fail("sim.threads must be >= 0");
  if (!(miner_p0 >= 0.0 && miner_p0 <= 1.0)) fail("agents.miner_p0 must lie in [0,1]");
  if (!(user_q0 >= 0.0 && user_q0 <= 1.0)) fail("agents.user_q0 must lie in [0,1]");
  if (frequency_window < 0) fail("agents.frequency_window must be >= 0");
  if (!(smoothing > 0.0)) fail("mechanism.smoothing must be > 0");
  if (!(mechanism.omega1 > 0.0 && mechanism.omega2 > 0.0)) fail("mechanism.omega1/omega2 must be > 0");
  if (!(mechanism.kappa_cap > 0.0)) fail("mechanism.kappa_cap must be > 0");
  try {
    model.validate();
  } catch (const std::exception& e) {
    fail(std::string("payoff: ") + e.what());
  }
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

int sample_row(const Eigen::RowVectorXd& row, Rng& rng) {
  std::discrete_distribution<int> pick(row.data(), row.data() + row.size());
  return pick(rng);
}

RunSummary summarize(const std::vector<RoundRecord>& records) {
  RunSummary s;
  s.final_p_e = records.back().p_e;
  std::size_t n = 0;
  for (auto it = records.rbegin(); it != records.rend() && n < 20 && it->phase == Phase::main; ++it, ++n) {
    s.final_mean_fee += it->fee;
    s.final_mean_start_time += it->start_time;
  }
  if (n > 0) {
    s.final_mean_fee /= static_cast<double>(n);
    s.final_mean_start_time /= static_cast<double>(n);
  }
  return s;
}

}  // namespace

SimTrace run_episode(const SimConfig& config, Rng& rng, int run_index) {
  config.validate();
  const StrategyGrid grid = config.grid();
  const PayoffTables tables = make_payoff_tables(grid, config.model);
  const PayoffRange range = controllable_payoff_range(tables);
  const bool zd_user = config.user == UserKind::zd;

  EvolutionaryMiner miner(grid, config.miner_p0, config.frequency_window);
  TransitionEstimate estimate(grid.eta1(), config.smoothing);
  std::optional<UserBaseline> baseline;
  if (!zd_user) baseline.emplace(config.user, grid, config.user_q0, config.wsls_aspiration);

  MechanismState mech;
  ControlledValues controlled;
  int prev_level = -1;
  int prev_fee = -1;

  SimTrace trace;
  trace.config_hash = fnv1a(serialize_sim(config));
  trace.run = run_index;
  const int total = config.rounds_prelim + config.rounds_main;
  trace.records.reserve(total);

  for (int round = 0; round < total; ++round) {
    RoundRecord rec;
    rec.round = round;
    rec.phase = round < config.rounds_prelim ? Phase::prelim : Phase::main;
    const bool main = rec.phase == Phase::main;

    if (zd_user && round == config.rounds_prelim) {
      const MechanismInit init = init_mechanism(estimate, range, config.mechanism);
      mech = init.state;
      if (config.play_mode == PlayMode::analytic) {
        controlled.anchor(miner_strategy_values(miner, tables).w, miner.own_frequency(), init.initial_target);
      }
    }

    // The user-side commits its fee first.
    double target = 0.0;
    if (zd_user && main) {
      const RoundTarget rt = mechanism_round_target(mech, estimate, prev_level);
      mech = rt.state;
      target = rt.target;
      rec.e_target = target;
      rec.branch = rt.branch;
      rec.kappa = mech.kappa;
      rec.target_clamped = rt.clamped;
      const ZDPolicy zd = zd_user_policy(tables, target, config.residual_rule);
      rec.fee_level = sample_row(zd.policy.q.row(grid.outcome_index(prev_level, prev_fee)), rng);
    } else if (zd_user) {
      rec.fee_level = std::uniform_int_distribution<int>(0, grid.eta2())(rng);
    } else {
      rec.fee_level = baseline_fee(*baseline, rng);
    }

    rec.miner_level = sample_miner_level(miner, rng);
    miner.record_fee(rec.fee_level);
    if (prev_level >= 0) estimate.observe(prev_level, rec.miner_level);

    const int outcome = grid.outcome_index(rec.miner_level, rec.fee_level);
    rec.s_m = tables.miner[outcome];
    rec.s_u = tables.user[outcome];
    rec.fee = grid.fee_value(rec.fee_level);
    rec.start_time = (1.0 - grid.miner_value(rec.miner_level)) * config.model.params.round_duration;
    if (baseline) baseline->record(rec.fee_level, rec.miner_level, rec.s_u);

    if (main) {
      if (zd_user && config.play_mode == PlayMode::analytic) {
        controlled.attribute(rec.branch, miner.own_frequency(), target);
        // A non-positive earliest-start value would zero p_e for good.
        rec.update_skipped = controlled.w_e() <= 0.0 || !evolutionary_update(miner, controlled.w_e(), target);
      } else {
        const MinerValues v = miner_strategy_values(miner, tables);
        rec.update_skipped = !evolutionary_update(miner, v.w_e, v.e_m);
        if (!zd_user) rec.expected_miner_payoff = v.e_m;
      }
      if (zd_user) rec.expected_miner_payoff = target;
    }
    rec.p_e = miner.p_earliest();

    prev_level = rec.miner_level;
    prev_fee = rec.fee_level;
    trace.records.push_back(rec);
  }
  trace.summary = summarize(trace.records);
  trace.summary.upsilon_m = long_run_average_payoff(trace);
  return trace;
}

double long_run_average_payoff(const SimTrace& trace) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const RoundRecord& r : trace.records) {
    if (r.phase == Phase::main && r.expected_miner_payoff) {
      sum += *r.expected_miner_payoff;
      ++n;
    }
  }
  if (n == 0) throw NotReadyError("trace has no main-phase rounds");
  return sum / static_cast<double>(n);
}

std::vector<AggregateRow> aggregate_traces(const std::vector<SimTrace>& traces) {
  using Getter = std::optional<double> (*)(const RoundRecord&);
  static const std::vector<std::pair<std::string, Getter>> metrics = {
      {"p_e", [](const RoundRecord& r) -> std::optional<double> { return r.p_e; }},
      {"fee", [](const RoundRecord& r) -> std::optional<double> { return r.fee; }},
      {"fee_level", [](const RoundRecord& r) -> std::optional<double> { return r.fee_level; }},
      {"miner_level", [](const RoundRecord& r) -> std::optional<double> { return r.miner_level; }},
      {"start_time", [](const RoundRecord& r) -> std::optional<double> { return r.start_time; }},
      {"s_m", [](const RoundRecord& r) -> std::optional<double> { return r.s_m; }},
      {"s_u", [](const RoundRecord& r) -> std::optional<double> { return r.s_u; }},
      {"e_target", [](const RoundRecord& r) { return r.e_target; }},
      {"kappa", [](const RoundRecord& r) { return r.kappa; }},
  };
  std::vector<AggregateRow> out;
  if (traces.empty()) return out;
  const std::size_t rounds = traces.front().records.size();
  for (std::size_t k = 0; k < rounds; ++k) {
    for (const auto& [name, get] : metrics) {
      std::vector<double> xs;
      for (const SimTrace& t : traces) {
        if (k < t.records.size()) {
          if (auto v = get(t.records[k])) xs.push_back(*v);
        }
      }
      if (xs.empty()) continue;
      double mean = 0.0;
      for (double x : xs) mean += x;
      mean /= static_cast<double>(xs.size());
      double var = 0.0;
      for (double x : xs) var += (x - mean) * (x - mean);
      const double sd = xs.size() > 1 ? std::sqrt(var / static_cast<double>(xs.size() - 1)) : 0.0;
      out.push_back({static_cast<int>(k), name, mean, sd});
    }
  }
  return out;
}

std::vector<double> mean_series(const std::vector<AggregateRow>& rows, const std::string& metric) {
  std::vector<double> out;
  for (const AggregateRow& r : rows) {
    if (r.metric != metric) continue;
    if (static_cast<std::size_t>(r.round) >= out.size()) out.resize(r.round + 1, std::nan(""));
    out[r.round] = r.mean;
  }
  return out;
}

ExperimentResult run_experiment(const SimConfig& config) {
  config.validate();
  ExperimentResult result;
  result.traces.resize(config.repeats);
  const int workers = std::max(
      1, std::min(config.repeats, config.threads > 0 ? config.threads
                                                     : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()))));
  auto worker = [&](int first) {
    for (int k = first; k < config.repeats; k += workers) {
      Rng rng(config.seed + static_cast<std::uint64_t>(k));
      result.traces[k] = run_episode(config, rng, k);
    }
  };
  std::vector<std::future<void>> jobs;
  for (int w = 0; w < workers; ++w) jobs.push_back(std::async(std::launch::async, worker, w));
  for (auto& j : jobs) j.get();
  result.aggregate = aggregate_traces(result.traces);
  return result;
}

}  // namespace feegame
