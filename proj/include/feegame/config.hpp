#pragma once

// Experiment configuration file: one `section.key = value` per line, `#`
// starts a comment. Unknown keys are rejected and the schema version is
// pinned.

#include <string>

#include "feegame/incircle.hpp"
#include "feegame/sim.hpp"

namespace feegame {

inline constexpr int kSchemaVersion = 1;

struct ExperimentConfig {
  SimConfig sim;
  MiningSystemModel incircle;
  SupermodularOptions supermodular;
  int gap_time_resolution = 101;
  int zd_check_policies = 100;
  std::string output_dir = "out";

  static ExperimentConfig defaults();

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// ConfigurationError names the offending key or line.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

std::string write_config(const ExperimentConfig& config);

// Canonical text of the simulation part, the input of the trace hash.
std::string serialize_sim(const SimConfig& config);

}  // namespace feegame
