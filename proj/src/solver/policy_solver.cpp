#include "solver/policy_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mmrev::solver {

namespace {

using ctmc::sampled_transition_weight;
using ctmc::transition_probability;

constexpr MachineState kFree = MachineState::kFree;
constexpr MachineState kBusy = MachineState::kBusy;

// Interior search for the busy-estimate wait: log-spaced scan, then
// golden-section refinement around the best scan point.
constexpr double kScanLow = 1e-4;
constexpr double kScanHigh = 1e3;
constexpr int kScanPoints = 211;
constexpr int kGoldenIterations = 200;

void require_positive_theta(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw std::domain_error("holding cost theta must be positive and finite");
  }
}

struct Maximum {
  double arg;
  double value;
};

template <typename F>
Maximum golden_section_max(F&& f, double a, double b) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < kGoldenIterations && (b - a) > 1e-13 * std::max(1.0, b); ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? Maximum{c, fc} : Maximum{d, fd};
}

}  // namespace

double v1_objective(const SystemParams& sys, double theta, WaitDecision tau) {
  if (!(theta >= 0.0)) throw std::domain_error("holding cost theta must be nonnegative");
  const auto& m = sys.machine;
  const double g_free = sampled_transition_weight(m, sys.mu, kBusy, kFree, 0.0, tau);
  const double g_busy = sampled_transition_weight(m, sys.mu, kBusy, kBusy, 0.0, tau);
  const double denom = 1.0 - g_busy;
  if (!(denom > 0.0)) {
    throw std::logic_error("v1 objective denominator is not positive: " + std::to_string(denom));
  }

  double numer = -sys.lambda * theta / sys.mu + sys.r_s * g_free;
  if (tau.is_finite()) {
    const double t = tau.duration();
    const double survive = std::exp(-sys.mu * t);
    numer = (sys.r_s * transition_probability(m, kBusy, kFree, t) -
             sys.c_d * transition_probability(m, kBusy, kBusy, t)) *
                survive -
            sys.lambda * theta * (-std::expm1(-sys.mu * t)) / sys.mu + sys.r_s * g_free;
  }
  return numer / denom;
}

V1Solution solve_v1(const SystemParams& sys, double theta) {
  require_positive_theta(theta);
  auto objective = [&](double t) { return v1_objective(sys, theta, WaitDecision::after(t)); };

  std::array<double, kScanPoints> taus{};
  std::array<double, kScanPoints> values{};
  const double step = std::log(kScanHigh / kScanLow) / (kScanPoints - 1);
  int best = 0;
  for (int k = 0; k < kScanPoints; ++k) {
    taus[k] = kScanLow * std::exp(step * k);
    values[k] = objective(taus[k]);
    if (values[k] > values[best]) best = k;
  }

  const double lo = best == 0 ? 0.0 : taus[best - 1];
  const double hi = best == kScanPoints - 1 ? taus[best] : taus[best + 1];
  Maximum interior = golden_section_max(objective, lo, hi);
  if (values[best] > interior.value) interior = {taus[best], values[best]};

  const double at_zero = objective(0.0);
  const double at_never = v1_objective(sys, theta, WaitDecision::never());

  // Far-out waits agree with the limit to rounding; the limit wins those ties.
  const double slack = 1e-12 * (1.0 + std::abs(interior.value));
  if (at_never >= interior.value - slack && at_never >= at_zero) {
    return {at_never, WaitDecision::never()};
  }
  if (at_zero >= interior.value) return {at_zero, WaitDecision::immediately()};
  return {interior.value, WaitDecision::after(interior.arg)};
}

PolicyCoefficients coefficients_from_v1(const SystemParams& sys, double theta,
                                        const V1Solution& v1) {
  const double rho = sys.rho();
  const auto& m = sys.machine;

  PolicyCoefficients c;
  c.theta = theta;
  c.v0 = sys.r_s;
  c.v1 = v1.v1;
  c.tau_10 = v1.tau_10;
  c.a_coef = sys.lambda * theta / sys.mu - (sys.c_d + c.v1) * m.pi_busy();
  c.b_coef = sys.c_d + (rho * sys.r_s + sys.mu * c.v1) / (rho + sys.mu);
  c.b0 = m.pi_busy() * c.b_coef;
  c.b1 = m.pi_free() * c.b_coef;

  if (c.a_coef > 0.0) {
    const double arg = (rho + sys.mu) * c.b1 / (sys.mu * c.a_coef);
    c.gamma = std::max(0.0, std::log(arg) / rho);
    // the numerical maximizer only pins the wait to ~1e-8; the fixed point is exact
    if (c.tau_10.is_finite()) c.tau_10 = WaitDecision::after(*c.gamma);
  } else if (c.a_coef == 0.0) {
    c.kappa = std::numeric_limits<double>::infinity();
  } else {
    c.kappa = std::max(0.0, std::log(c.b0 / std::abs(c.a_coef))) / rho;
  }
  return c;
}

PolicyCoefficients coefficients(const SystemParams& sys, double theta) {
  require_positive_theta(theta);
  return coefficients_from_v1(sys, theta, solve_v1(sys, theta));
}

WaitDecision optimal_wait(const PolicyCoefficients& coeffs, MachineState estimate, double age) {
  if (!(age >= 0.0)) throw std::domain_error("estimate age must be nonnegative");
  if (age == 0.0) {
    return estimate == kFree ? WaitDecision::immediately() : coeffs.tau_10;
  }
  if (coeffs.threshold_regime()) {
    if (!coeffs.gamma) throw std::logic_error("threshold regime without a threshold age");
    if (estimate == kFree) return WaitDecision::immediately();
    return WaitDecision::after(std::max(0.0, *coeffs.gamma - age));
  }
  if (!coeffs.kappa) throw std::logic_error("switching regime without a switching age");
  if (estimate == kBusy) return WaitDecision::never();
  return age <= *coeffs.kappa ? WaitDecision::immediately() : WaitDecision::never();
}

double value_recursion(const SystemParams& sys, double theta, MachineState estimate, double age,
                       WaitDecision tau, double v0, double v1) {
  if (!(age >= 0.0)) throw std::domain_error("estimate age must be nonnegative");
  const auto& m = sys.machine;
  const double continuation =
      sampled_transition_weight(m, sys.mu, estimate, kFree, age, tau) * v0 +
      sampled_transition_weight(m, sys.mu, estimate, kBusy, age, tau) * v1;
  if (tau.is_never()) return -sys.lambda * theta / sys.mu + continuation;

  const double t = tau.duration();
  const double submit = sys.r_s * transition_probability(m, estimate, kFree, age + t) -
                        sys.c_d * transition_probability(m, estimate, kBusy, age + t);
  return submit * std::exp(-sys.mu * t) -
         sys.lambda * theta * (-std::expm1(-sys.mu * t)) / sys.mu + continuation;
}

ExpectedValues expected_value(const SystemParams& sys, const PolicyCoefficients& coeffs) {
  const double alpha = sys.alpha();
  const double beta = sys.beta();
  const double rho = sys.rho();
  const double mu = sys.mu;
  const double lambda = sys.lambda;
  const double s = lambda + mu;  // rate of the acceptance-age distribution
  const double a = coeffs.a_coef;
  const double base = (beta * sys.r_s - alpha * sys.c_d) / rho;
  const double gap = sys.r_s - coeffs.v1;

  ClosedFormTerms t;
  const double age_decay = beta * mu * s * gap / (rho * (rho + mu) * (rho + mu + lambda));
  t.a0 = age_decay + a;
  t.a1 = rho * s * a / (lambda * (rho + mu));
  t.a2 = mu * rho * a / (lambda * (rho + mu + lambda));
  t.b0_term = alpha * s * (sys.r_s + sys.c_d) / (rho * (rho + s));

  ExpectedValues out{0.0, 0.0, t};
  if (coeffs.threshold_regime()) {
    if (!coeffs.gamma) throw std::logic_error("threshold regime without a threshold age");
    const double gamma = *coeffs.gamma;
    out.ev0 = base + t.b0_term;
    if (gamma > 0.0) {
      out.ev1 = base - t.a0 + t.a1 * std::exp(-mu * gamma) - t.a2 * std::exp(-s * gamma);
    } else {
      // Threshold clipped at zero: every busy estimate is submitted at once.
      // The a-term form relies on exp(-rho*Gamma) hitting the log argument,
      // which no longer holds once the positive part is active.
      out.ev1 = base - beta * s * (sys.r_s + sys.c_d) / (rho * (rho + s));
    }
    return out;
  }

  if (!coeffs.kappa) throw std::logic_error("switching regime without a switching age");
  const double kappa = *coeffs.kappa;
  out.ev1 = base - a - age_decay;
  const bool clipped = a < 0.0 && coeffs.b0 <= std::abs(a);
  if (clipped) {
    // Cannot occur for a maximizing V1 (B0 > |A| whenever A < 0); kept so a
    // hand-built coefficient set still gets the exact expectation.
    out.ev0 = base - a + alpha * mu * s * gap / (rho * (rho + mu) * (rho + mu + lambda));
  } else {
    const double tail = std::isinf(kappa) ? 0.0 : a * rho * std::exp(-s * kappa) / (rho + s);
    out.ev0 = base + t.b0_term - tail;
  }
  return out;
}

AbsorbingChain absorbing_chain(const SystemParams& sys) {
  const double alpha = sys.alpha();
  const double beta = sys.beta();
  const double mu = sys.mu;
  const double lambda = sys.lambda;
  enum { kBusyBusy = 0, kFreeBusy = 1, kFreeFree = 2, kBusyFree = 3 };
  enum { kAbsorbFree = 0, kAbsorbBusy = 1 };

  AbsorbingChain chain;
  auto& q = chain.sub_generator;
  auto& psi = chain.absorption_rates;
  q[kBusyBusy][kFreeBusy] = beta;
  q[kFreeBusy][kBusyBusy] = alpha;
  q[kFreeBusy][kFreeFree] = mu;
  q[kFreeFree][kBusyFree] = alpha;
  q[kBusyFree][kFreeFree] = beta;
  q[kBusyFree][kBusyBusy] = mu;
  psi[kBusyBusy][kAbsorbBusy] = lambda;
  psi[kFreeBusy][kAbsorbBusy] = lambda;
  psi[kFreeFree][kAbsorbFree] = lambda;
  psi[kBusyFree][kAbsorbFree] = lambda;
  for (int r = 0; r < 4; ++r) {
    double out = psi[r][0] + psi[r][1];
    for (int c = 0; c < 4; ++c) out += c == r ? 0.0 : q[r][c];
    q[r][r] = -out;
  }
  return chain;
}

AbsorptionProbabilities absorption_probabilities(const SystemParams& sys) {
  const AbsorbingChain chain = absorbing_chain(sys);

  // Solve sub_generator * X = absorption_rates by Gaussian elimination with
  // partial pivoting; the answer is -X restricted to the row of (1,1).
  std::array<std::array<double, 6>, 4> aug{};
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) aug[r][c] = chain.sub_generator[r][c];
    aug[r][4] = chain.absorption_rates[r][0];
    aug[r][5] = chain.absorption_rates[r][1];
  }
  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 4; ++r) {
      if (std::abs(aug[r][col]) > std::abs(aug[pivot][col])) pivot = r;
    }
    if (aug[pivot][col] == 0.0) throw std::logic_error("absorbing chain sub-generator is singular");
    std::swap(aug[pivot], aug[col]);
    for (int r = col + 1; r < 4; ++r) {
      const double f = aug[r][col] / aug[col][col];
      for (int c = col; c < 6; ++c) aug[r][c] -= f * aug[col][c];
    }
  }
  std::array<std::array<double, 2>, 4> x{};
  for (int r = 3; r >= 0; --r) {
    for (int k = 0; k < 2; ++k) {
      double acc = aug[r][4 + k];
      for (int c = r + 1; c < 4; ++c) acc -= aug[r][c] * x[c][k];
      x[r][k] = acc / aug[r][r];
    }
  }
  return {-x[0][0], -x[0][1]};
}

namespace {

double j_theta_with(const SystemParams& sys, const AbsorptionProbabilities& p,
                    const PolicyCoefficients& coeffs) {
  const ExpectedValues ev = expected_value(sys, coeffs);
  return p.p0 * ev.ev0 + p.p1 * ev.ev1 - coeffs.theta;
}

}  // namespace

double j_theta(const SystemParams& sys, double theta) {
  require_positive_theta(theta);
  return j_theta_with(sys, absorption_probabilities(sys), coefficients(sys, theta));
}

ThetaSolution solve_theta_star(const SystemParams& sys, double tol) {
  if (!(tol > 0.0)) throw std::domain_error("tolerance must be positive");
  const AbsorptionProbabilities p = absorption_probabilities(sys);

  // J(0+) > 0, and J decreases at least with slope one, so growing the upper
  // end geometrically from r_s terminates.
  double lower = 0.0;
  double upper = sys.r_s;
  PolicyCoefficients c = coefficients(sys, upper);
  double j = j_theta_with(sys, p, c);
  int iterations = 0;
  while (j > tol) {
    if (++iterations > kMaxBisectionIterations) {
      throw ConvergenceError("could not bracket the root of J(theta)", lower, upper);
    }
    lower = upper;
    upper *= kBracketGrowth;
    c = coefficients(sys, upper);
    j = j_theta_with(sys, p, c);
  }
  if (std::abs(j) <= tol) return {upper, c, j, iterations};

  for (int it = 0; it < kMaxBisectionIterations; ++it) {
    const double mid = 0.5 * (lower + upper);
    if (mid <= lower || mid >= upper) break;  // bracket is down to adjacent doubles
    c = coefficients(sys, mid);
    j = j_theta_with(sys, p, c);
    if (std::abs(j) <= tol) return {mid, c, j, iterations + it + 1};
    if (j > 0.0) {
      lower = mid;
    } else {
      upper = mid;
    }
  }
  throw ConvergenceError("bisection on J(theta) did not reach the tolerance", lower, upper);
}

}  // namespace mmrev::solver
