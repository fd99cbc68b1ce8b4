#pragma once

#include <array>
#include <optional>
#include <stdexcept>

#include "ctmc/ctmc.hpp"
#include "ctmc/wait_decision.hpp"
#include "solver/system_params.hpp"

namespace mmrev::solver {

/// Everything that pins down the optimal waiting policy at holding cost `theta`.
///
/// Exactly one of `gamma` (threshold regime, A > 0) and `kappa` (switching
/// regime, A <= 0) is set. `kappa` is +infinity when A == 0: the switching age
/// is never reached and a free estimate is always submitted immediately.
struct PolicyCoefficients {
  double theta = 0.0;
  double v0 = 0.0;  // value of (estimate free, age 0); always r_s
  double v1 = 0.0;  // value of (estimate busy, age 0)
  WaitDecision tau_10 = WaitDecision::immediately();
  double a_coef = 0.0;
  double b_coef = 0.0;
  double b0 = 0.0;  // alpha/(alpha+beta) * B
  double b1 = 0.0;  // beta/(alpha+beta) * B
  std::optional<double> gamma;
  std::optional<double> kappa;

  bool threshold_regime() const { return a_coef > 0.0; }
};

/// Scalars of the closed-form expectations. a0..a2 belong to the threshold
/// regime, b0_term to the switching regime; all four are filled either way.
struct ClosedFormTerms {
  double a0 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  double b0_term = 0.0;
};

struct V1Solution {
  double v1;
  WaitDecision tau_10;
};

struct ExpectedValues {
  double ev0;
  double ev1;
  ClosedFormTerms terms;
};

/// Transient part of the absorbing chain started after every submission.
/// Transient states are ordered (1,1), (0,1), (0,0), (1,0) as (X, estimate);
/// absorbing columns are (0*, 1*).
struct AbsorbingChain {
  std::array<std::array<double, 4>, 4> sub_generator{};
  std::array<std::array<double, 2>, 4> absorption_rates{};
};

struct AbsorptionProbabilities {
  double p0;
  double p1;
};

struct ThetaSolution {
  double theta_star;
  PolicyCoefficients coeffs;
  double j_at_root;
  int iterations;
};

/// Bisection ran out of iterations; carries the last bracket.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double lower, double upper)
      : std::runtime_error(what), lower_(lower), upper_(upper) {}
  double lower() const { return lower_; }
  double upper() const { return upper_; }

 private:
  double lower_;
  double upper_;
};

inline constexpr double kDefaultThetaTolerance = 1e-9;
inline constexpr int kMaxBisectionIterations = 200;
inline constexpr double kBracketGrowth = 2.0;

/// Value of a busy estimate at age 0 when every future busy sample also waits
/// `tau`, as an explicit ratio in `tau`.
double v1_objective(const SystemParams& sys, double theta, WaitDecision tau);

/// Global maximum of v1_objective over [0, inf]. The maximizer is Never when
/// the supremum is only approached in the limit.
V1Solution solve_v1(const SystemParams& sys, double theta);

PolicyCoefficients coefficients(const SystemParams& sys, double theta);

/// Builds the coefficients from an already known V1 (and its maximizer).
PolicyCoefficients coefficients_from_v1(const SystemParams& sys, double theta,
                                        const V1Solution& v1);

WaitDecision optimal_wait(const PolicyCoefficients& coeffs, MachineState estimate, double age);

/// One-step recursion: value of holding a job with estimate `estimate` of age
/// `age` for `tau`, given the values `v0`, `v1` of the age-0 states.
double value_recursion(const SystemParams& sys, double theta, MachineState estimate, double age,
                       WaitDecision tau, double v0, double v1);

/// E[V(i, U, tau*_{i,U})] for U ~ Exp(lambda + mu), i = 0, 1.
ExpectedValues expected_value(const SystemParams& sys, const PolicyCoefficients& coeffs);

AbsorbingChain absorbing_chain(const SystemParams& sys);
AbsorptionProbabilities absorption_probabilities(const SystemParams& sys);

/// Linearized objective; its unique root is the optimal revenue per job.
double j_theta(const SystemParams& sys, double theta);

ThetaSolution solve_theta_star(const SystemParams& sys, double tol = kDefaultThetaTolerance);

}  // namespace mmrev::solver
