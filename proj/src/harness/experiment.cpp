#include "harness/experiment.hpp"

#include <stdexcept>
#include <string>

namespace mmrev::harness {

std::string_view to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::kMu:
      return "mu";
    case SweepVariable::kLambda:
      return "lambda";
    case SweepVariable::kRs:
      return "r_s";
  }
  return "?";
}

SweepVariable parse_sweep_variable(std::string_view name) {
  if (name == "mu") return SweepVariable::kMu;
  if (name == "lambda") return SweepVariable::kLambda;
  if (name == "r_s" || name == "rs") return SweepVariable::kRs;
  throw std::invalid_argument("unknown sweep variable '" + std::string(name) +
                              "' (expected mu, lambda or r_s)");
}

void ExperimentSpec::validate() const {
  if (grid.empty()) throw std::invalid_argument("sweep grid is empty");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] > 0.0)) throw std::invalid_argument("sweep grid values must be positive");
    if (k > 0 && !(grid[k] > grid[k - 1])) {
      throw std::invalid_argument("sweep grid must be strictly increasing");
    }
  }
  if (policies.empty()) throw std::invalid_argument("policy list is empty");
  if (arrivals_per_point == 0) throw std::invalid_argument("arrivals per point must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
}

SystemParams with_value(const SystemParams& base, SweepVariable v, double x) {
  switch (v) {
    case SweepVariable::kMu:
      return SystemParams(base.machine, x, base.lambda, base.r_s, base.c_d);
    case SweepVariable::kLambda:
      return SystemParams(base.machine, base.mu, x, base.r_s, base.c_d);
    case SweepVariable::kRs:
      return SystemParams(base.machine, base.mu, base.lambda, x, base.c_d);
  }
  throw std::invalid_argument("bad sweep variable");
}

std::vector<double> linear_grid(double lo, double hi, int points) {
  if (points < 1) throw std::invalid_argument("grid needs at least one point");
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) {
    g[static_cast<std::size_t>(k)] = points == 1 ? lo : lo + (hi - lo) * k / (points - 1);
  }
  return g;
}

SystemParams preset_system(std::string_view name) {
  if (name == "canonical") return SystemParams(0.2, 0.5, 0.5, 0.3, 2.0, 3.0);
  if (name == "fast_busy") return SystemParams(0.5, 0.3, 0.5, 0.3, 2.0, 3.0);
  if (name == "heavy_traffic") return SystemParams(0.2, 0.5, 0.2, 3.0, 2.0, 0.2);
  throw std::invalid_argument("unknown parameter preset '" + std::string(name) + "'");
}

ExperimentSpec figure_preset(std::string_view name) {
  if (name.size() != 5 || name.substr(0, 3) != "fig") {
    throw std::invalid_argument("unknown figure preset '" + std::string(name) + "'");
  }
  const char fig = name[3];
  const char variant = name[4];
  if (variant != 'a' && variant != 'b') {
    throw std::invalid_argument("unknown figure preset '" + std::string(name) + "'");
  }
  const ctmc::MachineParams machine =
      variant == 'a' ? ctmc::MachineParams(0.2, 0.5) : ctmc::MachineParams(0.5, 0.3);

  ExperimentSpec s{.base = SystemParams(machine, 0.5, 0.3, 2.0, 3.0), .variable = SweepVariable::kMu,
                   .grid = {}, .policies = {}};
  s.policies.assign(std::begin(policies::kAllPolicies), std::end(policies::kAllPolicies));
  switch (fig) {
    case '4':
      s.variable = SweepVariable::kMu;
      s.grid = linear_grid(0.1, 1.0, 10);
      break;
    case '5':
      s.variable = SweepVariable::kLambda;
      s.grid = linear_grid(0.1, 1.0, 10);
      break;
    case '6':
      s.base = SystemParams(machine, 0.4, 0.3, 2.0, 3.0);
      s.variable = SweepVariable::kRs;
      s.grid = linear_grid(1.0, 5.0, 10);
      break;
    default:
      throw std::invalid_argument("unknown figure preset '" + std::string(name) + "'");
  }
  return s;
}

ExperimentSpec spec_from_json(const nlohmann::json& j) {
  ExperimentSpec s = figure_preset(j.value("figure", std::string("fig4a")));
  const SystemParams& b = s.base;
  s.base = SystemParams(j.value("alpha", b.alpha()), j.value("beta", b.beta()),
                        j.value("mu", b.mu), j.value("lambda", b.lambda),
                        j.value("r_s", b.r_s), j.value("c_d", b.c_d));
  if (j.contains("sweep_variable")) {
    s.variable = parse_sweep_variable(j.at("sweep_variable").get<std::string>());
  }
  if (j.contains("sweep_grid")) s.grid = j.at("sweep_grid").get<std::vector<double>>();
  if (j.contains("policies")) {
    s.policies.clear();
    for (const auto& p : j.at("policies")) {
      s.policies.push_back(policies::parse_policy(p.get<std::string>()));
    }
  }
  s.arrivals_per_point = j.value("arrivals_per_point", s.arrivals_per_point);
  s.seed = j.value("seed", s.seed);
  s.tol = j.value("tol", s.tol);
  return s;
}

nlohmann::json spec_to_json(const ExperimentSpec& s) {
  nlohmann::json pol = nlohmann::json::array();
  for (auto p : s.policies) pol.push_back(std::string(policies::to_string(p)));
  return {{"alpha", s.base.alpha()},
          {"beta", s.base.beta()},
          {"mu", s.base.mu},
          {"lambda", s.base.lambda},
          {"r_s", s.base.r_s},
          {"c_d", s.base.c_d},
          {"sweep_variable", std::string(to_string(s.variable))},
          {"sweep_grid", s.grid},
          {"policies", pol},
          {"arrivals_per_point", s.arrivals_per_point},
          {"seed", s.seed},
          {"tol", s.tol}};
}

}  // namespace mmrev::harness
