#include "harness/validate.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <functional>

#include "harness/experiment.hpp"
#include "oracles/oracles.hpp"
#include "policies/policies.hpp"
#include "sim/simulator.hpp"
#include "solver/policy_solver.hpp"

namespace mmrev::harness {

namespace {

constexpr double kSigmas = 4.0;
constexpr MachineState kStates[] = {MachineState::kFree, MachineState::kBusy};

class Suite {
 public:
  explicit Suite(const ValidationOptions& o) : opt_(o) {}

  void add(const std::string& name, bool ok, std::string detail) {
    report_.checks.push_back({name, ok, std::move(detail)});
  }

  // Runs `body`; an escaping exception fails the check instead of the suite.
  void guarded(const std::string& name, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      add(name, false, std::string("exception: ") + e.what());
    }
  }

  void run_preset(const std::string& preset, std::uint64_t preset_index) {
    const SystemParams sys = preset_system(preset);
    const std::string tag = preset + ".";
    std::uint64_t stream = opt_.seed * 1000 + preset_index * 100;

    guarded(tag + "transition_rk4", [&] {
      double worst = 0.0;
      for (double t : {0.1, 0.693, 1.0, 3.7, 10.0}) {
        const auto ref = oracles::rk4_transition(sys.machine, t);
        const auto p = ctmc::transition_matrix(sys.machine, t);
        for (int i = 0; i < 2; ++i) {
          for (int j = 0; j < 2; ++j) {
            worst = std::max(worst, std::abs(ref[i][j] - p.entries[i][j]));
          }
        }
      }
      add(tag + "transition_rk4", worst <= 1e-10, fmt::format("max abs diff {:.3g}", worst));
    });

    guarded(tag + "sampled_weight_quadrature", [&] {
      double worst = 0.0;
      for (MachineState i : kStates) {
        for (MachineState j : kStates) {
          for (double u : {0.0, 1.0, 4.0}) {
            for (WaitDecision tau : {WaitDecision::immediately(), WaitDecision::after(0.5),
                                     WaitDecision::after(2.0), WaitDecision::never()}) {
              const double a = ctmc::sampled_transition_weight(sys.machine, sys.mu, i, j, u, tau);
              const double b = oracles::quad_sampled_weight(sys.machine, sys.mu, i, j, u, tau);
              worst = std::max(worst, std::abs(a - b));
            }
          }
        }
      }
      add(tag + "sampled_weight_quadrature", worst <= 1e-9,
          fmt::format("max abs diff {:.3g}", worst));
    });

    const solver::ThetaSolution sol = solver::solve_theta_star(sys);
    const double theta = sol.theta_star;

    guarded(tag + "v1_objective_quadrature", [&] {
      double worst = 0.0;
      for (WaitDecision tau : {WaitDecision::immediately(), WaitDecision::after(0.5),
                               WaitDecision::after(2.0), WaitDecision::after(10.0),
                               WaitDecision::never()}) {
        worst = std::max(worst, std::abs(solver::v1_objective(sys, theta, tau) -
                                         oracles::quad_v1_objective(sys, theta, tau)));
      }
      add(tag + "v1_objective_quadrature", worst <= 1e-9,
          fmt::format("max abs diff {:.3g}", worst));
    });

    guarded(tag + "v1_grid_maximum", [&] {
      const auto grid = oracles::grid_max_v1(sys, theta);
      const double diff = std::abs(grid.value - sol.coeffs.v1);
      add(tag + "v1_grid_maximum", diff <= 1e-6,
          fmt::format("V1 {:.12g} grid {:.12g}", sol.coeffs.v1, grid.value));
    });

    guarded(tag + "expected_value_quadrature", [&] {
      double worst = 0.0;
      for (double scale : {0.5, 1.0, 1.5}) {
        solver::PolicyCoefficients c = solver::coefficients(sys, scale * theta);
        if (opt_.corrupt_coefficients) c.a_coef *= 1.05;
        const auto ev = solver::expected_value(sys, c);
        worst = std::max(worst, std::abs(ev.ev0 - oracles::quad_expected_value(
                                                      sys, c, MachineState::kFree)));
        worst = std::max(worst, std::abs(ev.ev1 - oracles::quad_expected_value(
                                                      sys, c, MachineState::kBusy)));
      }
      add(tag + "expected_value_quadrature", worst <= 1e-7,
          fmt::format("max abs diff {:.3g}", worst));
    });

    guarded(tag + "absorption_monte_carlo", [&] {
      const auto p = solver::absorption_probabilities(sys);
      const auto mc = oracles::mc_absorption_free(sys, opt_.mc_trials, stream++);
      const double sigma = std::sqrt(p.p0 * p.p1 / static_cast<double>(mc.trials));
      const double diff = std::abs(mc.p() - p.p0);
      add(tag + "absorption_monte_carlo",
          diff <= kSigmas * sigma && std::abs(p.p0 + p.p1 - 1.0) <= 1e-10,
          fmt::format("p0 {:.6f} mc {:.6f} ({:.2f} sigma)", p.p0, mc.p(), diff / sigma));
    });

    guarded(tag + "value_rollout_monte_carlo", [&] {
      const auto& c = sol.coeffs;
      double worst_sigma = 0.0;
      for (MachineState i : kStates) {
        for (double u : {0.0, 0.7, 2.5}) {
          const WaitDecision tau = solver::optimal_wait(c, i, u);
          const double exact = solver::value_recursion(sys, theta, i, u, tau, c.v0, c.v1);
          const auto mc = oracles::mc_value_rollout(sys, theta, i, u, tau, c.tau_10,
                                                    opt_.mc_trials / 10, stream++);
          worst_sigma = std::max(worst_sigma, std::abs(mc.mean - exact) / mc.std_error);
        }
      }
      add(tag + "value_rollout_monte_carlo", worst_sigma <= kSigmas,
          fmt::format("worst deviation {:.2f} sigma", worst_sigma));
    });

    guarded(tag + "theta_vs_simulation", [&] {
      const sim::SimConfig cfg{sys, policies::PolicyId::kOptWait, sol.coeffs,
                               sim::MaxArrivals{opt_.sim_arrivals}, stream++};
      const auto st = sim::run(cfg);
      const double rel = std::abs(st.revenue_per_job - theta) / theta;
      add(tag + "theta_vs_simulation", rel <= 0.02,
          fmt::format("theta* {:.6f} simulated {:.6f} +- {:.4f} ({:.2f}%)", theta,
                      st.revenue_per_job, st.revenue_stderr, 100 * rel));
    });

    guarded(tag + "acceptance_age_distribution", [&] {
      const sim::SimConfig cfg{sys, policies::PolicyId::kOptWait, sol.coeffs,
                               sim::MaxArrivals{opt_.ks_arrivals}, stream++};
      const auto ages = sim::estimate_age_at_acceptance(cfg);
      const double rate = sys.lambda + sys.mu;
      const double d = oracles::ks_statistic(
          ages.ages, [rate](double x) { return x <= 0 ? 0.0 : -std::expm1(-rate * x); });
      const double crit = oracles::ks_critical_value_1pct(ages.ages.size());
      add(tag + "acceptance_age_distribution", d <= crit,
          fmt::format("KS {:.5f} critical {:.5f} n={}", d, crit, ages.ages.size()));

      const auto p = solver::absorption_probabilities(sys);
      const double n = static_cast<double>(ages.accepted_free + ages.accepted_busy);
      const double freq = static_cast<double>(ages.accepted_free) / n;
      const double sigma = std::sqrt(p.p0 * p.p1 / n);
      add(tag + "acceptance_state_frequency", std::abs(freq - p.p0) <= kSigmas * sigma,
          fmt::format("free fraction {:.5f} p0 {:.5f}", freq, p.p0));
    });

    guarded(tag + "map_switch_age", [&] {
      const auto& m = sys.machine;
      double worst = 0.0;
      std::string detail;
      const auto check = [&](MachineState from, double analytic) {
        const auto p_free = [&](double u) {
          return ctmc::transition_probability(m, from, MachineState::kFree, u) - 0.5;
        };
        if (std::isinf(analytic)) {
          // posterior never crosses one half
          const bool flat = (p_free(0.0) > 0) == (p_free(1e3) > 0);
          worst = std::max(worst, flat ? 0.0 : 1.0);
          detail += fmt::format("{}: never ", from == MachineState::kFree ? "free" : "busy");
          return;
        }
        const double root = oracles::bisect_root(p_free, 0.0, 10.0 * analytic + 10.0);
        worst = std::max(worst, std::abs(root - analytic));
        detail += fmt::format("{}: {:.10f} ", from == MachineState::kFree ? "free" : "busy", root);
      };
      check(MachineState::kBusy, policies::map_busy_switch_age(m));
      check(MachineState::kFree, policies::map_free_switch_age(m));
      add(tag + "map_switch_age", worst <= 1e-9, detail);
    });

    guarded(tag + "kkt_stationarity", [&] {
      const auto& c = sol.coeffs;
      const WaitDecision raw = solver::solve_v1(sys, theta).tau_10;
      if (!raw.is_finite() || raw.duration() <= 0.0) {
        const bool consistent = raw.is_never() ? !c.threshold_regime() : true;
        add(tag + "kkt_stationarity", consistent,
            fmt::format("boundary maximizer tau_10={}", raw.as_double()));
        return;
      }
      const double rho = sys.rho();
      const double lhs = sys.mu * c.a_coef;
      const double rhs = (rho + sys.mu) * c.b1 * std::exp(-rho * raw.duration());
      const double resid = std::abs(lhs - rhs);
      add(tag + "kkt_stationarity", resid <= 1e-6,
          fmt::format("tau_10 {:.9f} residual {:.3g}", raw.duration(), resid));
    });

    guarded(tag + "dinkelbach_root", [&] {
      const double j = solver::j_theta(sys, theta);
      bool signs = true;
      for (int k = -10; k <= 10; ++k) {
        if (k == 0) continue;
        const double th = theta * (1.0 + 0.05 * k);
        signs = signs && ((solver::j_theta(sys, th) > 0) == (th < theta));
      }
      add(tag + "dinkelbach_root",
          std::abs(j) <= 1e-9 && signs && theta > 0 && theta <= sys.r_s,
          fmt::format("theta* {:.12g} J {:.3g} sign pattern {}", theta, j, signs ? "ok" : "bad"));
    });
  }

  ValidationReport take() { return std::move(report_); }

 private:
  ValidationOptions opt_;
  ValidationReport report_;
};

}  // namespace

bool ValidationReport::all_passed() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

ValidationReport run_validation(const ValidationOptions& options) {
  Suite suite(options);
  std::uint64_t index = 0;
  for (const char* preset : {"canonical", "fast_busy", "heavy_traffic"}) {
    suite.run_preset(preset, index++);
  }
  return suite.take();
}

nlohmann::json to_json(const ValidationReport& report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const CheckResult& c : report.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  return {{"passed", report.all_passed()}, {"checks", checks}};
}

}  // namespace mmrev::harness
