#include "feegame/payoff.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include <fmt/core.h>

#include "feegame/errors.hpp"

namespace feegame {

double MonotoneFunction::operator()(double v) const {
  switch (family) {
    case FunctionFamily::linear:
      return scale * v;
    case FunctionFamily::affine:
      return scale * v + offset;
    case FunctionFamily::power:
      return scale * std::pow(v, exponent) + offset;
  }
  return 0.0;
}

bool MonotoneFunction::nondecreasing() const {
  if (family == FunctionFamily::power) return scale >= 0.0 && exponent > 0.0;
  return scale >= 0.0;
}

bool MonotoneFunction::strictly_increasing() const {
  if (family == FunctionFamily::power) return scale > 0.0 && exponent > 0.0;
  return scale > 0.0;
}

std::string MonotoneFunction::to_string() const {
  switch (family) {
    case FunctionFamily::linear:
      return fmt::format("linear({})", scale);
    case FunctionFamily::affine:
      return fmt::format("affine({}, {})", scale, offset);
    case FunctionFamily::power:
      return fmt::format("power({}, {}, {})", scale, exponent, offset);
  }
  return {};
}

MonotoneFunction MonotoneFunction::parse(const std::string& text) {
  const auto open = text.find('(');
  const auto close = text.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open) {
    throw ConfigurationError("function text must look like name(args): '" + text + "'");
  }
  std::string name = text.substr(0, open);
  while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) name.pop_back();
  while (!name.empty() && std::isspace(static_cast<unsigned char>(name.front()))) name.erase(0, 1);

  std::vector<double> args;
  std::stringstream ss(text.substr(open + 1, close - open - 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      args.push_back(std::stod(item, &used));
      for (std::size_t k = used; k < item.size(); ++k) {
        if (!std::isspace(static_cast<unsigned char>(item[k]))) throw std::invalid_argument(item);
      }
    } catch (const std::exception&) {
      throw ConfigurationError("bad number '" + item + "' in function text '" + text + "'");
    }
  }

  auto expect = [&](std::size_t n) {
    if (args.size() != n) {
      throw ConfigurationError(fmt::format("'{}' takes {} argument(s): '{}'", name, n, text));
    }
  };
  MonotoneFunction f;
  if (name == "linear") {
    expect(1);
    f = linear(args[0]);
  } else if (name == "affine") {
    expect(2);
    f = affine(args[0], args[1]);
  } else if (name == "power") {
    if (args.size() == 2) args.push_back(0.0);
    expect(3);
    f = power(args[0], args[1], args[2]);
  } else {
    throw ConfigurationError("unknown function family '" + name + "' (linear, affine, power)");
  }
  if (!f.nondecreasing()) {
    throw ModelError("payoff function must be nondecreasing: '" + text + "'");
  }
  return f;
}

void EconomicParams::validate() const {
  if (!(varpi_m > 0 && varkappa_m > 0 && varpi_u > 0 && varkappa_u > 0)) {
    throw ModelError("scaling parameters varpi_m, varkappa_m, varpi_u, varkappa_u must be > 0");
  }
  if (!(max_fee > 0)) throw ModelError("max_fee must be > 0");
  if (!(round_duration > 0)) throw ModelError("round_duration must be > 0");
  if (!(subsidy >= 0)) throw ModelError("subsidy must be >= 0");
}

void SidePayoffModel::validate() const {
  params.validate();
  for (const auto* f : {&chi_m, &chi_u, &xi_m, &xi_u}) {
    if (!f->nondecreasing()) throw ModelError("payoff component is not nondecreasing: " + f->to_string());
  }
}

namespace {

void check_domain(const SidePayoffModel& model, double x, double y) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError(fmt::format("start strategy x={} outside [0,1]", x));
  if (!(y >= 0.0 && y <= model.params.max_fee)) {
    throw DomainError(fmt::format("fee y={} outside [0,{}]", y, model.params.max_fee));
  }
}

}  // namespace

double miner_side_payoff(const SidePayoffModel& model, double x, double y) {
  check_domain(model, x, y);
  const auto& p = model.params;
  return p.varpi_m * model.miner_profit(y) - p.varkappa_m * model.xi_m(x);
}

double user_side_payoff(const SidePayoffModel& model, double x, double y) {
  check_domain(model, x, y);
  const auto& p = model.params;
  return p.varpi_u * model.chi_u(x) - p.varkappa_u * model.xi_u(y);
}

StagePoint stage_equilibrium(const SidePayoffModel& model) {
  if (!model.xi_m.strictly_increasing() || !model.xi_u.strictly_increasing()) {
    throw PreconditionError("stage equilibrium needs strictly increasing cost functions Xi_m and Xi_u");
  }
  // dS_m/dx < 0 for every y and dS_u/dy < 0 for every x.
  return {0.0, 0.0};
}

}  // namespace feegame
