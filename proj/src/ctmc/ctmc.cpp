#include "ctmc/ctmc.hpp"

#include <cmath>
#include <stdexcept>

namespace mmrev::ctmc {

namespace {

bool positive_finite(double x) { return x > 0.0 && std::isfinite(x); }

// P_{ij}(t) = stationary_j + transient_ij * exp(-(alpha+beta) t)
double transient_coefficient(const MachineParams& p, MachineState from, MachineState to) {
  const double toward = to == MachineState::kFree ? p.pi_busy() : p.pi_free();
  if (from == to) return toward;
  return -(to == MachineState::kFree ? p.pi_free() : p.pi_busy());
}

// 1 - exp(-x) without cancellation for small x.
double one_minus_exp_neg(double x) { return -std::expm1(-x); }

}  // namespace

MachineParams::MachineParams(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!positive_finite(alpha) || !positive_finite(beta)) {
    throw std::domain_error("machine rates alpha and beta must be positive and finite");
  }
  rate_sum_ = alpha + beta;
  pi_free_ = beta / rate_sum_;
  pi_busy_ = alpha / rate_sum_;
}

double transition_probability(const MachineParams& params, MachineState from, MachineState to,
                              double t) {
  if (!(t >= 0.0)) throw std::domain_error("transition time must be nonnegative");
  const double decay = std::exp(-params.rate_sum() * t);
  return params.stationary(to) + transient_coefficient(params, from, to) * decay;
}

TransitionMatrix transition_matrix(const MachineParams& params, double t) {
  if (!(t >= 0.0)) throw std::domain_error("transition time must be nonnegative");
  const double decay = std::exp(-params.rate_sum() * t);
  const double pf = params.pi_free();
  const double pb = params.pi_busy();
  TransitionMatrix m;
  m.t = t;
  // Off-diagonal entries are computed directly and the diagonal as their
  // complement so each row sums to one exactly.
  m.entries[0][1] = pb * one_minus_exp_neg(params.rate_sum() * t);
  m.entries[1][0] = pf * one_minus_exp_neg(params.rate_sum() * t);
  m.entries[0][0] = pf + pb * decay;
  m.entries[1][1] = pb + pf * decay;
  return m;
}

double sampled_transition_weight(const MachineParams& params, double mu, MachineState from,
                                 MachineState to, double u, WaitDecision tau) {
  if (!positive_finite(mu)) throw std::domain_error("sampling rate mu must be positive");
  if (!(u >= 0.0)) throw std::domain_error("estimate age must be nonnegative");

  const double rho = params.rate_sum();
  const double head = tau.is_never() ? 1.0 : one_minus_exp_neg(mu * tau.duration());
  const double tail =
      tau.is_never() ? 1.0 : one_minus_exp_neg((mu + rho) * tau.duration());
  return params.stationary(to) * head +
         transient_coefficient(params, from, to) * std::exp(-rho * u) * mu / (mu + rho) * tail;
}

}  // namespace mmrev::ctmc
