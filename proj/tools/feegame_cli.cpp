#include <iostream>

#include <CLI11.hpp>

#include "feegame/commands.hpp"

int main(int argc, char** argv) {
  using namespace feegame;
  CLI::App app{"Fee-incentive game simulator"};
  app.require_subcommand(1);

  CommandOptions opts;
  std::string out_dir;
  std::uint64_t seed = 0;
  int repeats = 0;
  double target = 0.0;
  int policies = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "experiment config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
  };

  auto* simulate = app.add_subcommand("simulate", "run repeated episodes and write trace/aggregate CSVs");
  add_common(simulate);
  simulate->add_option("--seed", seed, "override sim.seed");
  simulate->add_option("--repeats", repeats, "override sim.repeats")->check(CLI::PositiveNumber);

  auto* zd_range = app.add_subcommand("zd-range", "print the controllable miner payoff range");
  add_common(zd_range);

  auto* zd_check = app.add_subcommand("zd-check", "check the payoff pinning against random miner policies");
  add_common(zd_check);
  zd_check->add_option("--target", target, "target miner payoff (default: range midpoint)");
  zd_check->add_option("--policies", policies, "number of random miner policies")->check(CLI::PositiveNumber);
  zd_check->add_option("--seed", seed, "override sim.seed");

  auto* supermodular = app.add_subcommand("verify-supermodular", "check supermodularity conditions on a grid");
  add_common(supermodular);

  auto* gap = app.add_subcommand("gap-profile", "sample mining income against cost over one round");
  add_common(gap);

  app.add_subcommand("default-config", "print a config file with every key at its default");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  for (auto* sub : app.get_subcommands()) {
    auto given = [&](const char* name) {
      const auto* opt = sub->get_option_no_throw(name);
      return opt != nullptr && opt->count() > 0;
    };
    if (given("--out")) opts.out_dir = out_dir;
    if (given("--seed")) opts.seed = seed;
    if (given("--repeats")) opts.repeats = repeats;
    if (given("--target")) opts.target = target;
    if (given("--policies")) opts.policies = policies;
  }

  if (*simulate) return cmd_simulate(opts, std::cout, std::cerr);
  if (*zd_range) return cmd_zd_range(opts, std::cout, std::cerr);
  if (*zd_check) return cmd_zd_check(opts, std::cout, std::cerr);
  if (*supermodular) return cmd_verify_supermodular(opts, std::cout, std::cerr);
  if (*gap) return cmd_gap_profile(opts, std::cout, std::cerr);
  return cmd_default_config(std::cout);
}
