#pragma once

// Brute-force reference computations. None of these use the closed forms they
// are meant to check: transition kernels come from integrating the forward
// equations, expectations from adaptive quadrature or Monte Carlo, maxima
// from dense grids.

#include <array>
#include <cstdint>
#include <functional>
#include <span>

#include "ctmc/ctmc.hpp"
#include "solver/policy_solver.hpp"
#include "solver/system_params.hpp"

namespace mmrev::oracles {

using Matrix2 = std::array<std::array<double, 2>, 2>;

/// Fixed-step RK4 on dP/dt = P Q for the machine generator Q.
Matrix2 rk4_transition(const ctmc::MachineParams& params, double t, int steps = 4000);

/// Adaptive Gauss-Kronrod quadrature; `b` may be +infinity.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-13);

/// sampled_transition_weight by quadrature of mu e^{-mu y} P_ij(u + y).
double quad_sampled_weight(const ctmc::MachineParams& params, double mu, MachineState from,
                           MachineState to, double u, WaitDecision tau);

/// v1_objective assembled from quadrature weights.
double quad_v1_objective(const SystemParams& sys, double theta, WaitDecision tau);

struct GridMaximum {
  double value;
  WaitDecision arg;
};

/// Maximum of v1_objective over a uniform grid on [0, horizon] refined by
/// Brent's method, compared against the Never limit.
GridMaximum grid_max_v1(const SystemParams& sys, double theta, double horizon = 200.0,
                        int points = 20001);

/// E[value_recursion(i, U, optimal_wait(i, U))] for U ~ Exp(lambda + mu),
/// integrated piecewise around the policy's breakpoints.
double quad_expected_value(const SystemParams& sys, const solver::PolicyCoefficients& coeffs,
                           MachineState estimate);

struct Proportion {
  std::uint64_t hits = 0;
  std::uint64_t trials = 0;
  double p() const { return trials ? static_cast<double>(hits) / static_cast<double>(trials) : 0.0; }
};

/// Fraction of runs of the (machine, estimate) chain started at (1,1) whose
/// first job arrival sees a free estimate.
Proportion mc_absorption_free(const SystemParams& sys, std::uint64_t trials, std::uint64_t seed);

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo rollout of the per-job reward process: start holding a job
/// with estimate `estimate` of age `age`, wait `tau`; a sample showing free
/// submits at once, a sample showing busy restarts the wait with `tau_10`.
/// Each episode pays its terminal reward minus lambda*theta*holding time.
MeanEstimate mc_value_rollout(const SystemParams& sys, double theta, MachineState estimate,
                              double age, WaitDecision tau, WaitDecision tau_10,
                              std::uint64_t episodes, std::uint64_t seed);

/// Kolmogorov-Smirnov statistic of sorted samples against `cdf`.
double ks_statistic(std::span<const double> sorted, const std::function<double(double)>& cdf);

/// Asymptotic KS critical value at level 1% for n samples.
double ks_critical_value_1pct(std::size_t n);

/// Root of a continuous function with a sign change on [lo, hi] by bisection.
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double tol = 1e-14);

}  // namespace mmrev::oracles
