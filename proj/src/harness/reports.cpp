#include "harness/reports.hpp"

#include <cmath>
#include <fmt/format.h>

namespace mmrev::harness {

namespace {

std::string wait_text(const WaitDecision& w) {
  return w.is_never() ? std::string("never") : fmt::format("{:.6g}", w.duration());
}

}  // namespace

SolveReport make_solve_report(const SystemParams& sys, double tol,
                              const std::vector<double>& ages) {
  SolveReport r{sys, tol, solver::solve_theta_star(sys, tol), 0.0,
                solver::absorption_probabilities(sys), {}};
  r.j_at_root = solver::j_theta(sys, r.solution.theta_star);

  std::vector<double> grid = ages;
  if (grid.empty()) {
    for (int k = 0; k <= 10; ++k) grid.push_back(0.5 * k);
  }
  for (double u : grid) {
    r.wait_table.push_back({u, solver::optimal_wait(r.solution.coeffs, MachineState::kFree, u),
                            solver::optimal_wait(r.solution.coeffs, MachineState::kBusy, u)});
  }
  return r;
}

nlohmann::json to_json(const SystemParams& sys) {
  return {{"alpha", sys.alpha()}, {"beta", sys.beta()}, {"mu", sys.mu},
          {"lambda", sys.lambda}, {"r_s", sys.r_s},     {"c_d", sys.c_d}};
}

nlohmann::json to_json(const WaitDecision& w) {
  if (w.is_never()) return "never";
  return w.duration();
}

nlohmann::json to_json(const SolveReport& r) {
  const auto& c = r.solution.coeffs;
  nlohmann::json j = {{"params", to_json(r.sys)},
                      {"tol", r.tol},
                      {"theta_star", r.solution.theta_star},
                      {"j_at_root", r.j_at_root},
                      {"iterations", r.solution.iterations},
                      {"regime", c.threshold_regime() ? "threshold" : "switching"},
                      {"v0", c.v0},
                      {"v1", c.v1},
                      {"tau_10", to_json(c.tau_10)},
                      {"A", c.a_coef},
                      {"B", c.b_coef},
                      {"B0", c.b0},
                      {"B1", c.b1},
                      {"p0", r.absorption.p0},
                      {"p1", r.absorption.p1}};
  if (c.gamma) j["gamma"] = *c.gamma;
  if (c.kappa) j["kappa"] = std::isinf(*c.kappa) ? nlohmann::json("never") : nlohmann::json(*c.kappa);
  nlohmann::json table = nlohmann::json::array();
  for (const WaitRow& w : r.wait_table) {
    table.push_back({{"u", w.age},
                     {"tau_free", to_json(w.free_estimate)},
                     {"tau_busy", to_json(w.busy_estimate)}});
  }
  j["wait_table"] = table;
  return j;
}

std::string to_text(const SolveReport& r) {
  const auto& c = r.solution.coeffs;
  std::string out = fmt::format(
      "parameters   alpha={} beta={} mu={} lambda={} r_s={} c_d={}\n"
      "theta*       {:.12g}   (|J(theta*)| = {:.3g}, tol {:.1g})\n"
      "regime       {}\n"
      "V1           {:.12g}   tau*_(1,0) = {}\n"
      "A            {:.12g}\n"
      "B            {:.12g}   B0 = {:.12g}   B1 = {:.12g}\n",
      r.sys.alpha(), r.sys.beta(), r.sys.mu, r.sys.lambda, r.sys.r_s, r.sys.c_d,
      r.solution.theta_star, std::abs(r.j_at_root), r.tol,
      c.threshold_regime() ? "threshold (wait (Gamma - u)+ on a busy estimate)"
                           : "switching (submit free estimates younger than kappa)",
      c.v1, wait_text(c.tau_10), c.a_coef, c.b_coef, c.b0, c.b1);
  if (c.gamma) out += fmt::format("Gamma        {:.12g}\n", *c.gamma);
  if (c.kappa) {
    out += std::isinf(*c.kappa) ? std::string("kappa        never reached\n")
                                : fmt::format("kappa        {:.12g}\n", *c.kappa);
  }
  out += fmt::format("p0, p1       {:.12g}, {:.12g}\n\n", r.absorption.p0, r.absorption.p1);
  out += fmt::format("{:>8}  {:>14}  {:>14}\n", "u", "tau*(0,u)", "tau*(1,u)");
  for (const WaitRow& w : r.wait_table) {
    out += fmt::format("{:>8.4g}  {:>14}  {:>14}\n", w.age, wait_text(w.free_estimate),
                       wait_text(w.busy_estimate));
  }
  return out;
}

nlohmann::json to_json(const sim::SimStats& s) {
  return {{"S", s.submitted_ok},
          {"D", s.discarded_penalty},
          {"N", s.total_arrivals},
          {"rejected", s.rejected},
          {"lost_while_holding", s.lost_while_holding},
          {"elapsed", s.elapsed},
          {"busy_time", s.busy_time},
          {"revenue_per_job", s.revenue_per_job},
          {"revenue_stderr", s.revenue_stderr},
          {"revenue_per_time", s.revenue_per_time},
          {"revenue_per_time_stderr", s.revenue_per_time_stderr},
          {"batches", s.batches}};
}

}  // namespace mmrev::harness
