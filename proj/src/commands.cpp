#include "feegame/commands.hpp"

#include <filesystem>
#include <fstream>
#include <functional>

#include <fmt/core.h>
#include <fmt/ostream.h>

#include "feegame/csv.hpp"
#include "feegame/errors.hpp"
#include "feegame/sim.hpp"

namespace feegame {

namespace fs = std::filesystem;

namespace {

// Loads the config, applies overrides and maps exceptions to exit codes.
int guarded(const CommandOptions& opts, std::ostream& err, const std::function<int(ExperimentConfig&)>& body) {
  try {
    ExperimentConfig config = load_config(opts.config_path);
    if (opts.seed) config.sim.seed = *opts.seed;
    if (opts.repeats) config.sim.repeats = *opts.repeats;
    if (opts.policies) config.zd_check_policies = *opts.policies;
    if (opts.out_dir) config.output_dir = *opts.out_dir;
    config.sim.validate();
    return body(config);
  } catch (const IoError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitIo;
  } catch (const InfeasibleTargetError& e) {
    fmt::print(err, "error: {} (valid interval [{}, {}])\n", e.what(), e.lo(), e.hi());
    return kExitInvalid;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitInvalid;
  }
}

std::ofstream open_output(const std::string& dir, const std::string& name) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create output directory '{}': {}", dir, ec.message()));
  const std::string path = (fs::path(dir) / name).string();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError(fmt::format("cannot write '{}'", path));
  return f;
}

void finish(std::ofstream& f, const std::string& name) {
  f.flush();
  if (!f) throw IoError(fmt::format("write to '{}' failed", name));
}

PayoffTables tables_for(const ExperimentConfig& c) { return make_payoff_tables(c.sim.grid(), c.sim.model); }

}  // namespace

MinerPolicy random_miner_policy(const StrategyGrid& grid, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MinerPolicy p{grid, Eigen::MatrixXd(grid.fee_levels(), grid.miner_levels())};
  for (Eigen::Index i = 0; i < p.p.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.p.cols(); ++j) p.p(i, j) = u(rng) + 1e-12;
    p.p.row(i) /= p.p.row(i).sum();
  }
  return p;
}

int cmd_simulate(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(opts, err, [&](ExperimentConfig& c) {
    const ExperimentResult result = run_experiment(c.sim);
    auto trace = open_output(c.output_dir, "trace.csv");
    write_trace_csv(trace, result.traces);
    finish(trace, "trace.csv");
    auto agg = open_output(c.output_dir, "aggregate.csv");
    write_aggregate_csv(agg, result.aggregate);
    finish(agg, "aggregate.csv");

    double p_e = 0.0, fee = 0.0, start = 0.0, upsilon = 0.0;
    for (const SimTrace& t : result.traces) {
      p_e += t.summary.final_p_e;
      fee += t.summary.final_mean_fee;
      start += t.summary.final_mean_start_time;
      upsilon += t.summary.upsilon_m;
    }
    const double n = static_cast<double>(result.traces.size());
    fmt::print(out, "user={} runs={} config_hash={:016x}\n", to_string(c.sim.user), result.traces.size(),
               result.traces.front().config_hash);
    fmt::print(out, "final p_e mean: {:.4f}\n", p_e / n);
    fmt::print(out, "final fee mean (last 20 rounds): {:.4f}\n", fee / n);
    fmt::print(out, "final start time mean (last 20 rounds): {:.4f}\n", start / n);
    fmt::print(out, "long-run miner payoff: {:.4f}\n", upsilon / n);
    fmt::print(out, "wrote {}/trace.csv and {}/aggregate.csv\n", c.output_dir, c.output_dir);
    return kExitOk;
  });
}

int cmd_zd_range(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(opts, err, [&](ExperimentConfig& c) {
    const PayoffRange r = controllable_payoff_range(tables_for(c));
    CsvWriter w(out);
    w.row({"e_min", "e_max"});
    w.row({csv_number(r.lo), csv_number(r.hi)});
    return kExitOk;
  });
}

int cmd_zd_check(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(opts, err, [&](ExperimentConfig& c) {
    const PayoffTables tables = tables_for(c);
    const PayoffRange range = controllable_payoff_range(tables);
    const double target = opts.target.value_or(0.5 * (range.lo + range.hi));
    const ZDPolicy zd = zd_user_policy(tables, target, c.sim.residual_rule);
    if (c.zd_check_policies < 1) throw ConfigurationError("zd.check_policies must be >= 1");

    Rng rng(c.sim.seed);
    double worst = 0.0;
    std::vector<std::vector<std::string>> rows;
    for (int k = 0; k < c.zd_check_policies; ++k) {
      const MinerPolicy p = random_miner_policy(tables.grid, rng);
      const StationaryResult st = stationary_distribution(build_transition_matrix(zd.policy, p));
      const ExpectedPayoffs e = expected_payoffs(st.sigma, tables);
      const double residual = std::abs(zd.coefficients.alpha * e.miner + zd.coefficients.gamma);
      worst = std::max(worst, residual);
      rows.push_back({std::to_string(k), csv_number(e.miner), csv_number(residual)});
    }
    if (opts.out_dir) {
      auto f = open_output(c.output_dir, "zd_check.csv");
      CsvWriter w(f);
      w.row({"policy", "e_m", "residual"});
      for (const auto& r : rows) w.row(r);
      finish(f, "zd_check.csv");
    }
    constexpr double tol = 1e-9;
    fmt::print(out, "range [{}, {}] target {} alpha {} gamma {}\n", range.lo, range.hi, target,
               zd.coefficients.alpha, zd.coefficients.gamma);
    fmt::print(out, "max residual over {} miner policies: {:.3e} ({})\n", c.zd_check_policies, worst,
               worst < tol ? "ok" : "FAILED");
    return worst < tol ? kExitOk : kExitCheckFailed;
  });
}

int cmd_verify_supermodular(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(opts, err, [&](ExperimentConfig& c) {
    const SupermodularReport report = check_supermodular(c.incircle, c.supermodular);
    auto f = open_output(c.output_dir, "supermodular.csv");
    write_supermodular_csv(f, report);
    finish(f, "supermodular.csv");
    fmt::print(out, "miner condition a: {}, condition b: {}, min mixed partial {:.4e} (tol {:.1e})\n",
               report.condition_a_everywhere(), report.condition_b_everywhere(), report.min_mixed_partial,
               report.miner_tolerance);
    fmt::print(out, "user condition: {}, min mixed partial {:.4e} (tol {:.1e})\n", report.user_condition_everywhere(),
               report.min_user_mixed_partial, report.user_tolerance);
    if (report.used_surrogate) fmt::print(out, "step activation checked through its logistic surrogate\n");
    const std::string violation = report.first_violation();
    if (!violation.empty()) {
      fmt::print(out, "first violation: {}\n", violation);
      return kExitCheckFailed;
    }
    fmt::print(out, "all sampled conditions hold\n");
    return kExitOk;
  });
}

int cmd_gap_profile(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(opts, err, [&](ExperimentConfig& c) {
    const GapProfile profile = mining_gap_profile(c.incircle, c.gap_time_resolution);
    auto f = open_output(c.output_dir, "gap_profile.csv");
    write_gap_csv(f, profile);
    finish(f, "gap_profile.csv");
    fmt::print(out, "gap length {:.4f} of round duration {}\n", profile.gap_length, c.incircle.round_duration);
    return kExitOk;
  });
}

int cmd_default_config(std::ostream& out) {
  out << write_config(ExperimentConfig::defaults());
  return kExitOk;
}

}  // namespace feegame
