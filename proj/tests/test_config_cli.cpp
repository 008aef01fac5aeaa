#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "feegame/commands.hpp"
#include "feegame/config.hpp"
#include "feegame/csv.hpp"
#include "feegame/errors.hpp"

using namespace feegame;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  static const fs::path dir = [] {
    std::random_device rd;
    fs::path p = fs::temp_directory_path() / ("feegame_test_" + std::to_string(rd()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
  const fs::path p = scratch_dir() / name;
  std::ofstream(p, std::ios::binary) << text;
  return p.string();
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string replace_line(std::string text, const std::string& key, const std::string& line) {
  const auto pos = text.find(key + " =");
  REQUIRE(pos != std::string::npos);
  const auto end = text.find('\n', pos);
  return text.replace(pos, end - pos, line);
}

std::string small_config_text() {
  auto c = ExperimentConfig::defaults();
  c.sim.rounds_prelim = 10;
  c.sim.rounds_main = 20;
  c.sim.repeats = 2;
  c.sim.threads = 1;
  c.zd_check_policies = 20;
  return write_config(c);
}

std::string partials_config_text(double g) {
  auto c = ExperimentConfig::defaults();
  c.incircle.activation = Activation::constant_partials;
  c.incircle.lambda = 0.8;
  c.incircle.miner_strategies = {0.5, 0.5};
  c.incircle.user_fees = {1.0, 3.0};
  c.incircle.user_value = 0.5;
  c.incircle.partials = {1.0, 0.2, 1.5, 0.5, g < 1.0 ? 0.5 : 0.001, g};
  return write_config(c);
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(FEEGAME_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config round trip") {
  auto c = ExperimentConfig::defaults();
  CHECK(parse_config(write_config(c)) == c);

  c.sim.user = UserKind::wsls;
  c.sim.wsls_aspiration = 1.25;
  c.sim.model.chi_m = MonotoneFunction::power(2.0, 0.5);
  c.sim.seed = 123456789012345ull;
  c.sim.mechanism.omega1 = 0.1 + 0.2;
  c.incircle.activation = Activation::logistic;
  c.incircle.miner_strategies = {0.1, 0.25, 1.0 / 3};
  c.output_dir = "results/run a";
  const auto back = parse_config(write_config(c));
  CHECK(back == c);
  CHECK(serialize_sim(back.sim) == serialize_sim(c.sim));
}

TEST_CASE("config parse errors name the problem") {
  const std::string base = write_config(ExperimentConfig::defaults());
  auto message = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigurationError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  const auto missing = replace_line(base, "sim.user", "# no user");
  CHECK(message(missing).find("sim.user") != std::string::npos);
  CHECK(message(base + "sim.colour = red\n").find("sim.colour") != std::string::npos);
  CHECK(message(base + "grid.eta1 = 4\n").find("grid.eta1") != std::string::npos);
  CHECK(message(replace_line(base, "schema_version", "schema_version = 2")).find("schema") != std::string::npos);
  CHECK_FALSE(message(replace_line(base, "grid.eta2", "grid.eta2 = ten")).empty());
  CHECK_FALSE(message(replace_line(base, "sim.user", "sim.user = grim")).empty());
  CHECK_FALSE(message(replace_line(base, "grid.eta2", "grid.eta2 =")).empty());
  CHECK_FALSE(message(base + "just some words\n").empty());
  CHECK(message(base + "  # trailing comment\n\n").empty());
  CHECK_THROWS_AS(load_config((scratch_dir() / "absent.cfg").string()), IoError);
}

TEST_CASE("the trace hash depends on simulation keys only") {
  auto a = ExperimentConfig::defaults();
  auto b = a;
  b.output_dir = "elsewhere";
  b.incircle.lambda = 3.0;
  CHECK(serialize_sim(a.sim) == serialize_sim(b.sim));
  b.sim.seed = 2;
  CHECK(serialize_sim(a.sim) != serialize_sim(b.sim));
}

TEST_CASE("csv escaping and line endings") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_escape("two\nlines") == "\"two\nlines\"");
  CHECK(csv_number(0.1) == "0.1");
  CHECK(std::stod(csv_number(1.0 / 3)) == 1.0 / 3);
  std::ostringstream out;
  CsvWriter w(out);
  w.row({"x", "y,z"});
  w.row({"1", ""});
  CHECK(out.str() == "x,\"y,z\"\r\n1,\r\n");
}

TEST_CASE("simulate writes traces and aggregates") {
  const auto cfg = write_file("small.cfg", small_config_text());
  const fs::path out_dir = scratch_dir() / "sim_out";
  std::ostringstream out, err;
  CHECK(cmd_simulate({cfg, out_dir.string()}, out, err) == kExitOk);
  CHECK(out.str().find("final p_e mean") != std::string::npos);
  const auto trace = read_file(out_dir / "trace.csv");
  CHECK(trace.rfind("run,round,phase,fee_level,miner_level,s_m,s_u,e_target,branch,p_e,kappa,start_time\r\n", 0) == 0);
  std::size_t lines = 0;
  for (std::size_t p = 0; (p = trace.find("\r\n", p)) != std::string::npos; p += 2) ++lines;
  CHECK(lines == 1 + 2 * 30);
  CHECK(trace.find('\n') == trace.find("\r\n") + 1);
  const auto agg = read_file(out_dir / "aggregate.csv");
  CHECK(agg.rfind("round,metric,mean,std\r\n", 0) == 0);

  // Same seed, same files.
  const fs::path again = scratch_dir() / "sim_again";
  CHECK(cmd_simulate({cfg, again.string()}, out, err) == kExitOk);
  CHECK(read_file(again / "trace.csv") == trace);
}

TEST_CASE("simulate exit codes") {
  std::ostringstream out, err;
  const auto missing = write_file("missing.cfg", replace_line(small_config_text(), "sim.seed", ""));
  CHECK(cmd_simulate({missing, (scratch_dir() / "x").string()}, out, err) == kExitInvalid);
  CHECK(err.str().find("sim.seed") != std::string::npos);

  const auto cfg = write_file("small.cfg", small_config_text());
  const auto blocker = write_file("blocker", "a file, not a directory");
  CHECK(cmd_simulate({cfg, blocker + "/sub"}, out, err) == kExitIo);
  CHECK(cmd_simulate({(scratch_dir() / "nope.cfg").string()}, out, err) == kExitIo);

  CommandOptions bad{cfg, (scratch_dir() / "y").string()};
  bad.repeats = 0;
  CHECK(cmd_simulate(bad, out, err) == kExitInvalid);
}

TEST_CASE("zd-range and zd-check") {
  const auto cfg = write_file("small.cfg", small_config_text());
  std::ostringstream out, err;
  CHECK(cmd_zd_range({cfg}, out, err) == kExitOk);
  CHECK(out.str() == "e_min,e_max\r\n2.5,5.9\r\n");

  CommandOptions check{cfg};
  check.target = 4.2;
  out.str("");
  CHECK(cmd_zd_check(check, out, err) == kExitOk);
  CHECK(out.str().find("ok") != std::string::npos);

  check.target = 7.0;
  err.str("");
  CHECK(cmd_zd_check(check, out, err) == kExitInvalid);
  CHECK(err.str().find("2.5") != std::string::npos);
  CHECK(err.str().find("5.9") != std::string::npos);

  check.target = std::nullopt;
  check.out_dir = (scratch_dir() / "zd").string();
  check.policies = 5;
  CHECK(cmd_zd_check(check, out, err) == kExitOk);
  const auto csv = read_file(scratch_dir() / "zd" / "zd_check.csv");
  CHECK(csv.rfind("policy,e_m,residual\r\n", 0) == 0);
}

TEST_CASE("verify-supermodular exit codes") {
  std::ostringstream out, err;
  const auto good = write_file("good.cfg", partials_config_text(2.0));
  CHECK(cmd_verify_supermodular({good, (scratch_dir() / "sm").string()}, out, err) == kExitOk);
  CHECK(read_file(scratch_dir() / "sm" / "supermodular.csv")
            .rfind("side,v_i,v_j,condition_a,condition_b,user_condition,mixed_partial\r\n", 0) == 0);

  const auto bad = write_file("bad.cfg", partials_config_text(0.01));
  out.str("");
  CHECK(cmd_verify_supermodular({bad, (scratch_dir() / "sm").string()}, out, err) == kExitCheckFailed);
  CHECK(out.str().find("first violation") != std::string::npos);

  const auto coarse = write_file("coarse.cfg", replace_line(partials_config_text(2.0), "incircle.grid_resolution",
                                                            "incircle.grid_resolution = 2"));
  CHECK(cmd_verify_supermodular({coarse, (scratch_dir() / "sm").string()}, out, err) == kExitInvalid);
}

TEST_CASE("gap-profile writes one row per sample") {
  std::ostringstream out, err;
  const auto cfg = write_file("small.cfg", small_config_text());
  CHECK(cmd_gap_profile({cfg, (scratch_dir() / "gap").string()}, out, err) == kExitOk);
  const auto csv = read_file(scratch_dir() / "gap" / "gap_profile.csv");
  CHECK(csv.rfind("t,income,cost,in_gap\r\n", 0) == 0);
  std::size_t lines = 0;
  for (std::size_t p = 0; (p = csv.find("\r\n", p)) != std::string::npos; p += 2) ++lines;
  CHECK(lines == 1 + 101);
}

TEST_CASE("default-config parses back to the defaults") {
  std::ostringstream out;
  CHECK(cmd_default_config(out) == kExitOk);
  CHECK(parse_config(out.str()) == ExperimentConfig::defaults());
}

TEST_CASE("command-line exit codes") {
  const auto cfg = write_file("small.cfg", small_config_text());
  const auto out_dir = (scratch_dir() / "cli").string();
  CHECK(run_cli("zd-range --config " + cfg) == 0);
  CHECK(run_cli("simulate --config " + cfg + " --out " + out_dir + " --seed 5 --repeats 1") == 0);
  CHECK(fs::exists(fs::path(out_dir) / "trace.csv"));
  CHECK(run_cli("zd-check --config " + cfg + " --target 7.0") == 2);
  CHECK(run_cli("zd-check --config " + cfg + " --target 4.2 --policies 5") == 0);
  CHECK(run_cli("simulate --config " + cfg + " --repeats many") == 2);
  CHECK(run_cli("simulate") == 2);
  CHECK(run_cli("frobnicate --config " + cfg) == 2);
  CHECK(run_cli("gap-profile --config " + cfg + " --out " + out_dir) == 0);
  CHECK(run_cli("default-config") == 0);
}
