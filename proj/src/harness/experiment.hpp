#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "policies/policies.hpp"
#include "solver/policy_solver.hpp"
#include "solver/system_params.hpp"

namespace mmrev::harness {

enum class SweepVariable { kMu, kLambda, kRs };

std::string_view to_string(SweepVariable v);
SweepVariable parse_sweep_variable(std::string_view name);

/// One figure-style experiment: vary a single parameter over a grid and run
/// every listed policy at each point.
struct ExperimentSpec {
  SystemParams base;
  SweepVariable variable = SweepVariable::kMu;
  std::vector<double> grid;
  std::vector<policies::PolicyId> policies;
  std::uint64_t arrivals_per_point = 100000;
  std::uint64_t seed = 1;
  double tol = solver::kDefaultThetaTolerance;

  /// Throws std::invalid_argument on an empty or non-increasing grid, a
  /// nonpositive grid value or an empty policy list.
  void validate() const;
};

SystemParams with_value(const SystemParams& base, SweepVariable v, double x);

std::vector<double> linear_grid(double lo, double hi, int points);

/// Canonical parameter sets: "canonical" is (0.2, 0.5, 0.5, 0.3, 2, 3);
/// "fast_busy" swaps in the (0.5, 0.3) machine; "heavy_traffic" is
/// (0.2, 0.5, 0.2, 3, 2, 0.2), whose optimum waits a finite time on a busy estimate.
SystemParams preset_system(std::string_view name);

/// Figure presets "fig4a" ... "fig6b". Grid endpoints come from the figure
/// axes; the a/b suffix selects the (0.2, 0.5) or (0.5, 0.3) machine.
ExperimentSpec figure_preset(std::string_view name);

/// Fields: figure, alpha, beta, mu, lambda, r_s, c_d, sweep_variable,
/// sweep_grid, policies, arrivals_per_point, seed, tol. Missing fields fall
/// back to the named figure (default fig4a).
ExperimentSpec spec_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const ExperimentSpec& spec);

}  // namespace mmrev::harness
