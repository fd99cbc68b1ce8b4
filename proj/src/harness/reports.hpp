#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "sim/simulator.hpp"
#include "solver/policy_solver.hpp"

namespace mmrev::harness {

struct WaitRow {
  double age;
  WaitDecision free_estimate;
  WaitDecision busy_estimate;
};

struct SolveReport {
  SystemParams sys;
  double tol;
  solver::ThetaSolution solution;
  double j_at_root;  // J re-evaluated at the returned root
  solver::AbsorptionProbabilities absorption;
  std::vector<WaitRow> wait_table;
};

SolveReport make_solve_report(const SystemParams& sys, double tol,
                              const std::vector<double>& ages = {});

/// Stable field names: params, tol, theta_star, j_at_root, regime, v0, v1,
/// tau_10, A, B, B0, B1, gamma | kappa, p0, p1, wait_table.
nlohmann::json to_json(const SolveReport& r);
std::string to_text(const SolveReport& r);

nlohmann::json to_json(const SystemParams& sys);
nlohmann::json to_json(const WaitDecision& w);
nlohmann::json to_json(const sim::SimStats& s);

}  // namespace mmrev::harness
