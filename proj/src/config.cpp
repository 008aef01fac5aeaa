#include "feegame/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include <fmt/core.h>

#include "feegame/errors.hpp"

namespace feegame {

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig c;
  c.incircle.miner_strategies = {1.0, 1.0};
  c.incircle.user_fees = {2.0, 8.0};
  c.incircle.cost_rate = 1.0;
  return c;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigurationError(fmt::format("key '{}': '{}' is not a number", key, v));
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long n = std::stoll(v, &used);
    if (used == v.size()) return n;
  } catch (const std::exception&) {
  }
  throw ConfigurationError(fmt::format("key '{}': '{}' is not an integer", key, v));
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    if (!v.empty() && v[0] != '-') {
      const unsigned long long n = std::stoull(v, &used);
      if (used == v.size()) return n;
    }
  } catch (const std::exception&) {
  }
  throw ConfigurationError(fmt::format("key '{}': '{}' is not a non-negative integer", key, v));
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
  return out;
}

std::string list_text(const std::vector<double>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? ", " : "") + fmt::format("{}", v[k]);
  return out;
}

MonotoneFunction to_function(const std::string& key, const std::string& v) {
  try {
    return MonotoneFunction::parse(v);
  } catch (const std::exception& e) {
    throw ConfigurationError(fmt::format("key '{}': {}", key, e.what()));
  }
}

template <class F>
auto named(const std::string& key, F&& parse) {
  try {
    return parse();
  } catch (const ConfigurationError& e) {
    throw ConfigurationError(fmt::format("key '{}': {}", key, e.what()));
  }
}

struct Entry {
  std::string key;
  bool required = false;
  bool simulation = false;  // part of the simulation hash
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

std::string num(double v) { return fmt::format("{}", v); }

const std::vector<Entry>& entries() {
  using C = ExperimentConfig;
  static const std::vector<Entry> table = [] {
    std::vector<Entry> t;
    auto real = [&](std::string key, bool sim, double& (*ref)(C&)) {
      t.push_back({key, false, sim, [ref](const C& c) { return num(ref(const_cast<C&>(c))); },
                   [ref, key](C& c, const std::string& v) { ref(c) = to_double(key, v); }});
    };
    auto integer = [&](std::string key, bool required, bool sim, int& (*ref)(C&)) {
      t.push_back({key, required, sim, [ref](const C& c) { return std::to_string(ref(const_cast<C&>(c))); },
                   [ref, key](C& c, const std::string& v) { ref(c) = static_cast<int>(to_int(key, v)); }});
    };
    auto function = [&](std::string key, MonotoneFunction& (*ref)(C&)) {
      t.push_back({key, false, true, [ref](const C& c) { return ref(const_cast<C&>(c)).to_string(); },
                   [ref, key](C& c, const std::string& v) { ref(c) = to_function(key, v); }});
    };

    t.push_back({"schema_version", true, false, [](const C&) { return std::to_string(kSchemaVersion); },
                 [](C&, const std::string& v) {
                   if (to_int("schema_version", v) != kSchemaVersion) {
                     throw ConfigurationError(
                         fmt::format("unsupported schema_version {} (expected {})", v, kSchemaVersion));
                   }
                 }});

    function("payoff.chi_m", [](C& c) -> MonotoneFunction& { return c.sim.model.chi_m; });
    function("payoff.chi_u", [](C& c) -> MonotoneFunction& { return c.sim.model.chi_u; });
    function("payoff.xi_m", [](C& c) -> MonotoneFunction& { return c.sim.model.xi_m; });
    function("payoff.xi_u", [](C& c) -> MonotoneFunction& { return c.sim.model.xi_u; });
    real("payoff.varpi_m", true, [](C& c) -> double& { return c.sim.model.params.varpi_m; });
    real("payoff.varkappa_m", true, [](C& c) -> double& { return c.sim.model.params.varkappa_m; });
    real("payoff.varpi_u", true, [](C& c) -> double& { return c.sim.model.params.varpi_u; });
    real("payoff.varkappa_u", true, [](C& c) -> double& { return c.sim.model.params.varkappa_u; });
    real("payoff.max_fee", true, [](C& c) -> double& { return c.sim.model.params.max_fee; });
    real("payoff.subsidy", true, [](C& c) -> double& { return c.sim.model.params.subsidy; });
    real("payoff.round_duration", true, [](C& c) -> double& { return c.sim.model.params.round_duration; });

    integer("grid.eta1", true, true, [](C& c) -> int& { return c.sim.eta1; });
    integer("grid.eta2", true, true, [](C& c) -> int& { return c.sim.eta2; });

    integer("sim.rounds_prelim", true, true, [](C& c) -> int& { return c.sim.rounds_prelim; });
    integer("sim.rounds_main", true, true, [](C& c) -> int& { return c.sim.rounds_main; });
    integer("sim.repeats", true, true, [](C& c) -> int& { return c.sim.repeats; });
    t.push_back({"sim.seed", true, true, [](const C& c) { return std::to_string(c.sim.seed); },
                 [](C& c, const std::string& v) { c.sim.seed = to_u64("sim.seed", v); }});
    t.push_back({"sim.user", true, true, [](const C& c) { return to_string(c.sim.user); },
                 [](C& c, const std::string& v) { c.sim.user = named("sim.user", [&] { return parse_user_kind(v); }); }});
    t.push_back({"sim.play_mode", false, true, [](const C& c) { return to_string(c.sim.play_mode); },
                 [](C& c, const std::string& v) {
                   c.sim.play_mode = named("sim.play_mode", [&] { return parse_play_mode(v); });
                 }});
    integer("sim.threads", false, false, [](C& c) -> int& { return c.sim.threads; });

    real("agents.miner_p0", true, [](C& c) -> double& { return c.sim.miner_p0; });
    real("agents.user_q0", true, [](C& c) -> double& { return c.sim.user_q0; });
    integer("agents.frequency_window", false, true, [](C& c) -> int& { return c.sim.frequency_window; });
    t.push_back({"agents.wsls_aspiration", false, true,
                 [](const C& c) { return c.sim.wsls_aspiration ? num(*c.sim.wsls_aspiration) : std::string("mean"); },
                 [](C& c, const std::string& v) {
                   if (v == "mean") {
                     c.sim.wsls_aspiration.reset();
                   } else {
                     c.sim.wsls_aspiration = to_double("agents.wsls_aspiration", v);
                   }
                 }});

    real("mechanism.omega1", true, [](C& c) -> double& { return c.sim.mechanism.omega1; });
    real("mechanism.omega2", true, [](C& c) -> double& { return c.sim.mechanism.omega2; });
    real("mechanism.kappa_cap", true, [](C& c) -> double& { return c.sim.mechanism.kappa_cap; });
    real("mechanism.smoothing", true, [](C& c) -> double& { return c.sim.smoothing; });
    t.push_back({"mechanism.residual_rule", false, true, [](const C& c) { return to_string(c.sim.residual_rule); },
                 [](C& c, const std::string& v) {
                   c.sim.residual_rule = named("mechanism.residual_rule", [&] { return parse_residual_rule(v); });
                 }});

    integer("zd.check_policies", false, false, [](C& c) -> int& { return c.zd_check_policies; });

    t.push_back({"incircle.miner_strategies", false, false,
                 [](const C& c) { return list_text(c.incircle.miner_strategies); },
                 [](C& c, const std::string& v) { c.incircle.miner_strategies = to_list("incircle.miner_strategies", v); }});
    t.push_back({"incircle.user_fees", false, false, [](const C& c) { return list_text(c.incircle.user_fees); },
                 [](C& c, const std::string& v) { c.incircle.user_fees = to_list("incircle.user_fees", v); }});
    real("incircle.lambda", false, [](C& c) -> double& { return c.incircle.lambda; });
    real("incircle.round_duration", false, [](C& c) -> double& { return c.incircle.round_duration; });
    real("incircle.max_fee", false, [](C& c) -> double& { return c.incircle.max_fee; });
    real("incircle.subsidy", false, [](C& c) -> double& { return c.incircle.subsidy; });
    real("incircle.cost_rate", false, [](C& c) -> double& { return c.incircle.cost_rate; });
    real("incircle.eps_m", false, [](C& c) -> double& { return c.incircle.eps_m; });
    real("incircle.sig_m", false, [](C& c) -> double& { return c.incircle.sig_m; });
    real("incircle.eps_u", false, [](C& c) -> double& { return c.incircle.eps_u; });
    real("incircle.sig_u", false, [](C& c) -> double& { return c.incircle.sig_u; });
    real("incircle.user_value", false, [](C& c) -> double& { return c.incircle.user_value; });
    real("incircle.fee_cost_slope", false, [](C& c) -> double& { return c.incircle.fee_cost_slope; });
    t.push_back({"incircle.activation", false, false, [](const C& c) { return to_string(c.incircle.activation); },
                 [](C& c, const std::string& v) {
                   c.incircle.activation = named("incircle.activation", [&] { return parse_activation(v); });
                 }});
    real("incircle.sharpness", false, [](C& c) -> double& { return c.incircle.sharpness; });
    real("incircle.partials.base_activity", false, [](C& c) -> double& { return c.incircle.partials.base_activity; });
    real("incircle.partials.a", false, [](C& c) -> double& { return c.incircle.partials.a; });
    real("incircle.partials.base_rate", false, [](C& c) -> double& { return c.incircle.partials.base_rate; });
    real("incircle.partials.d", false, [](C& c) -> double& { return c.incircle.partials.d; });
    real("incircle.partials.base_cost", false, [](C& c) -> double& { return c.incircle.partials.base_cost; });
    real("incircle.partials.g", false, [](C& c) -> double& { return c.incircle.partials.g; });
    integer("incircle.grid_resolution", false, false, [](C& c) -> int& { return c.supermodular.grid_resolution; });
    integer("incircle.time_samples", false, false, [](C& c) -> int& { return c.supermodular.time_samples; });
    integer("incircle.time_resolution", false, false, [](C& c) -> int& { return c.gap_time_resolution; });

    t.push_back({"output.dir", false, false, [](const C& c) { return c.output_dir; },
                 [](C& c, const std::string& v) { c.output_dir = v; }});
    return t;
  }();
  return table;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  std::map<std::string, const Entry*> by_key;
  for (const Entry& e : entries()) by_key[e.key] = &e;

  ExperimentConfig config = ExperimentConfig::defaults();
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigurationError(fmt::format("line {}: expected 'key = value', got '{}'", number, line));
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = by_key.find(key);
    if (it == by_key.end()) throw ConfigurationError(fmt::format("line {}: unknown key '{}'", number, key));
    if (!seen.insert(key).second) throw ConfigurationError(fmt::format("line {}: duplicate key '{}'", number, key));
    if (value.empty()) throw ConfigurationError(fmt::format("line {}: key '{}' has no value", number, key));
    it->second->set(config, value);
  }
  for (const Entry& e : entries()) {
    if (e.required && !seen.count(e.key)) throw ConfigurationError(fmt::format("missing required key '{}'", e.key));
  }
  config.sim.validate();
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string write_config(const ExperimentConfig& config) {
  std::string out;
  std::string section;
  for (const Entry& e : entries()) {
    const std::string head = e.key.substr(0, e.key.find('.'));
    if (head != section && !section.empty()) out += "\n";
    section = head;
    out += e.key + " = " + e.get(config) + "\n";
  }
  return out;
}

std::string serialize_sim(const SimConfig& config) {
  ExperimentConfig c;
  c.sim = config;
  std::string out;
  for (const Entry& e : entries()) {
    if (e.simulation) out += e.key + " = " + e.get(c) + "\n";
  }
  return out;
}

}  // namespace feegame
