#pragma once

// Subcommand drivers shared by the command-line tool and its tests. Each
// returns the process exit status:
//   0 success, 1 a check failed, 2 invalid configuration or arguments,
//   3 file I/O failure.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include <Eigen/Dense>

#include "feegame/agents.hpp"
#include "feegame/config.hpp"

namespace feegame {

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitInvalid = 2, kExitIo = 3 };

struct CommandOptions {
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> repeats;
  std::optional<double> target;
  std::optional<int> policies;
};

int cmd_simulate(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_zd_range(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_zd_check(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_verify_supermodular(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_gap_profile(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_default_config(std::ostream& out);

// Row-stochastic miner policy with independent uniform weights per row.
MinerPolicy random_miner_policy(const StrategyGrid& grid, Rng& rng);

}  // namespace feegame
