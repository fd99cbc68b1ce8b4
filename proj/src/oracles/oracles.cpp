#include "oracles/oracles.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "sim/simulator.hpp"

namespace mmrev::oracles {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix2 mul_generator(const Matrix2& p, double alpha, double beta) {
  // P * Q with Q = [[-alpha, alpha], [beta, -beta]]
  Matrix2 out{};
  for (int r = 0; r < 2; ++r) {
    out[r][0] = -alpha * p[r][0] + beta * p[r][1];
    out[r][1] = alpha * p[r][0] - beta * p[r][1];
  }
  return out;
}

Matrix2 axpy(const Matrix2& p, double h, const Matrix2& k) {
  Matrix2 out{};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) out[r][c] = p[r][c] + h * k[r][c];
  return out;
}

// Machine state after `duration`, simulated flip by flip.
bool evolve_busy(bool busy, double duration, double alpha, double beta, std::mt19937_64& rng) {
  while (true) {
    const double hold = std::exponential_distribution<double>(busy ? beta : alpha)(rng);
    if (hold > duration) return busy;
    duration -= hold;
    busy = !busy;
  }
}

}  // namespace

Matrix2 rk4_transition(const ctmc::MachineParams& params, double t, int steps) {
  Matrix2 p{{{1.0, 0.0}, {0.0, 1.0}}};
  if (t == 0.0) return p;
  const double h = t / steps;
  const double a = params.alpha();
  const double b = params.beta();
  for (int s = 0; s < steps; ++s) {
    const Matrix2 k1 = mul_generator(p, a, b);
    const Matrix2 k2 = mul_generator(axpy(p, h / 2, k1), a, b);
    const Matrix2 k3 = mul_generator(axpy(p, h / 2, k2), a, b);
    const Matrix2 k4 = mul_generator(axpy(p, h, k3), a, b);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c)
        p[r][c] += h / 6.0 * (k1[r][c] + 2 * k2[r][c] + 2 * k3[r][c] + k4[r][c]);
  }
  return p;
}

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  if (b <= a) return 0.0;
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, rel_tol,
                                                                       &error);
}

double quad_sampled_weight(const ctmc::MachineParams& params, double mu, MachineState from,
                           MachineState to, double u, WaitDecision tau) {
  const double upper = tau.is_never() ? kInf : tau.duration();
  return integrate(
      [&](double y) {
        return mu * std::exp(-mu * y) * ctmc::transition_probability(params, from, to, u + y);
      },
      0.0, upper);
}

double quad_v1_objective(const SystemParams& sys, double theta, WaitDecision tau) {
  const auto& m = sys.machine;
  const double g_free =
      quad_sampled_weight(m, sys.mu, MachineState::kBusy, MachineState::kFree, 0.0, tau);
  const double g_busy =
      quad_sampled_weight(m, sys.mu, MachineState::kBusy, MachineState::kBusy, 0.0, tau);
  double numer = -sys.lambda * theta / sys.mu + sys.r_s * g_free;
  if (tau.is_finite()) {
    const double t = tau.duration();
    const Matrix2 p = rk4_transition(m, t, std::max(4000, static_cast<int>(t * 100)));
    numer = (sys.r_s * p[1][0] - sys.c_d * p[1][1]) * std::exp(-sys.mu * t) -
            sys.lambda * theta * (1.0 - std::exp(-sys.mu * t)) / sys.mu + sys.r_s * g_free;
  }
  return numer / (1.0 - g_busy);
}

GridMaximum grid_max_v1(const SystemParams& sys, double theta, double horizon, int points) {
  auto f = [&](double t) { return solver::v1_objective(sys, theta, WaitDecision::after(t)); };
  const double step = horizon / (points - 1);
  int best = 0;
  double best_val = f(0.0);
  for (int k = 1; k < points; ++k) {
    const double v = f(k * step);
    if (v > best_val) {
      best_val = v;
      best = k;
    }
  }
  double arg = best * step;
  if (best > 0 && best < points - 1) {
    auto neg = [&](double t) { return -f(t); };
    const auto [x, fx] =
        boost::math::tools::brent_find_minima(neg, (best - 1) * step, (best + 1) * step, 52);
    if (-fx > best_val) {
      best_val = -fx;
      arg = x;
    }
  }
  const double never = solver::v1_objective(sys, theta, WaitDecision::never());
  if (never >= best_val - 1e-13) return {never, WaitDecision::never()};
  return {best_val, WaitDecision::after(arg)};
}

double quad_expected_value(const SystemParams& sys, const solver::PolicyCoefficients& coeffs,
                           MachineState estimate) {
  const double rate = sys.lambda + sys.mu;
  auto integrand = [&](double u) {
    const WaitDecision tau = solver::optimal_wait(coeffs, estimate, u);
    return solver::value_recursion(sys, coeffs.theta, estimate, u, tau, coeffs.v0, coeffs.v1) *
           rate * std::exp(-rate * u);
  };
  double split = 0.0;
  if (coeffs.gamma && *coeffs.gamma > 0.0) split = *coeffs.gamma;
  if (coeffs.kappa && std::isfinite(*coeffs.kappa)) split = *coeffs.kappa;
  // u = 0 is a single point where the age-0 rule applies; it carries no mass.
  return integrate(integrand, 0.0, split) + integrate(integrand, split, kInf);
}

Proportion mc_absorption_free(const SystemParams& sys, std::uint64_t trials, std::uint64_t seed) {
  std::mt19937_64 rng = sim::make_stream(seed, 0xab5);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Proportion out;
  out.trials = trials;
  for (std::uint64_t n = 0; n < trials; ++n) {
    bool busy = true;
    bool est_busy = true;
    while (true) {
      // Competing clocks: machine flip, sample (only matters if the estimate
      // is stale), job arrival.
      const double flip = busy ? sys.beta() : sys.alpha();
      const double sample = busy != est_busy ? sys.mu : 0.0;
      const double total = flip + sample + sys.lambda;
      const double r = unif(rng) * total;
      if (r < flip) {
        busy = !busy;
      } else if (r < flip + sample) {
        est_busy = busy;
      } else {
        if (!est_busy) ++out.hits;
        break;
      }
    }
  }
  return out;
}

MeanEstimate mc_value_rollout(const SystemParams& sys, double theta, MachineState estimate,
                              double age, WaitDecision tau, WaitDecision tau_10,
                              std::uint64_t episodes, std::uint64_t seed) {
  std::mt19937_64 rng = sim::make_stream(seed, 0x7011);
  std::exponential_distribution<double> sample_gap(sys.mu);
  const double a = sys.alpha();
  const double b = sys.beta();
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::uint64_t n = 0; n < episodes; ++n) {
    bool busy = evolve_busy(estimate == MachineState::kBusy, age, a, b, rng);
    WaitDecision wait = tau;
    double held = 0.0;
    double reward = 0.0;
    while (true) {
      const double y = sample_gap(rng);
      if (wait.is_never() || y <= wait.duration()) {
        busy = evolve_busy(busy, y, a, b, rng);
        held += y;
        if (!busy) {
          reward = sys.r_s;  // free sample: submit at once
          break;
        }
        wait = tau_10;
        if (wait.is_finite() && wait.duration() == 0.0) {
          reward = -sys.c_d;
          break;
        }
        continue;
      }
      busy = evolve_busy(busy, wait.duration(), a, b, rng);
      held += wait.duration();
      reward = busy ? -sys.c_d : sys.r_s;
      break;
    }
    const double x = reward - sys.lambda * theta * held;
    sum += x;
    sum_sq += x * x;
  }
  const double n = static_cast<double>(episodes);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  return {mean, std::sqrt(var / n)};
}

double ks_statistic(std::span<const double> sorted, const std::function<double(double)>& cdf) {
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_critical_value_1pct(std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  return 1.6276 / (sn + 0.12 + 0.11 / sn);
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi, double tol) {
  double flo = f(lo);
  if (flo * f(hi) > 0.0) throw std::invalid_argument("bisect_root: no sign change on bracket");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace mmrev::oracles
