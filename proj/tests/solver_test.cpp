#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles/oracles.hpp"
#include "solver/policy_solver.hpp"

using namespace mmrev;
using namespace mmrev::solver;

namespace {

constexpr MachineState F = MachineState::kFree;
constexpr MachineState B = MachineState::kBusy;

SystemParams canonical() { return SystemParams(0.2, 0.5, 0.5, 0.3, 2.0, 3.0); }
SystemParams fast_busy() { return SystemParams(0.5, 0.3, 0.5, 0.3, 2.0, 3.0); }
// small penalty and heavy traffic put the optimum in the threshold regime
SystemParams threshold_point() { return SystemParams(0.2, 0.5, 0.2, 3.0, 2.0, 0.2); }

SystemParams random_system(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> rate(0.1, 1.0), mu(0.05, 1.0), lam(0.1, 3.0),
      rs(1.0, 5.0), cd(0.1, 4.0);
  return SystemParams(rate(rng), rate(rng), mu(rng), lam(rng), rs(rng), cd(rng));
}

}  // namespace

TEST(V1Objective, ImmediateSubmissionPaysPenalty) {
  EXPECT_NEAR(v1_objective(canonical(), 0.7, WaitDecision::immediately()), -3.0, 1e-15);
}

TEST(V1Objective, NeverLimit) {
  // 2 - 0.3 * 1 * 1.2 / 0.25
  EXPECT_NEAR(v1_objective(canonical(), 1.0, WaitDecision::never()), 0.56, 1e-14);
  EXPECT_NEAR(oracles::quad_v1_objective(canonical(), 1.0, WaitDecision::after(1e4)), 0.56, 1e-9);
  EXPECT_NEAR(v1_objective(canonical(), 1.0, WaitDecision::after(1e4)), 0.56, 1e-12);
}

TEST(V1Objective, MatchesQuadrature) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> theta(0.05, 2.0), wait(0.0, 20.0);
  for (int k = 0; k < 30; ++k) {
    const SystemParams sys = random_system(rng);
    const double th = theta(rng);
    const WaitDecision tau = WaitDecision::after(wait(rng));
    EXPECT_NEAR(v1_objective(sys, th, tau), oracles::quad_v1_objective(sys, th, tau), 1e-9);
  }
}

TEST(SolveV1, FrozenNeverOptimum) {
  const V1Solution s = solve_v1(canonical(), 0.5);
  EXPECT_NEAR(s.v1, 1.28, 1e-12);
  EXPECT_TRUE(s.tau_10.is_never());
}

TEST(SolveV1, FrozenInteriorOptimum) {
  // scipy bounded search over the explicit ratio
  const V1Solution s = solve_v1(threshold_point(), 0.2);
  EXPECT_NEAR(s.v1, 0.013363826347, 1e-10);
  ASSERT_TRUE(s.tau_10.is_finite());
  EXPECT_NEAR(s.tau_10.duration(), 0.93428297, 1e-5);
}

TEST(SolveV1, MatchesDenseGrid) {
  for (const SystemParams& sys : {canonical(), fast_busy(), threshold_point()}) {
    for (double th : {0.1, 0.5, 1.0}) {
      const auto grid = oracles::grid_max_v1(sys, th);
      EXPECT_NEAR(solve_v1(sys, th).v1, grid.value, 1e-6);
    }
  }
}

TEST(SolveV1, BoundedBelowByPenalty) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> theta(0.01, 5.0);
  for (int k = 0; k < 50; ++k) {
    const SystemParams sys = random_system(rng);
    EXPECT_GE(solve_v1(sys, theta(rng)).v1, -sys.c_d);
  }
}

TEST(SolveV1, RejectsNonPositiveTheta) {
  EXPECT_THROW(solve_v1(canonical(), 0.0), std::domain_error);
}

TEST(Coefficients, StructureOnRandomPoints) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> theta(0.01, 3.0);
  for (int k = 0; k < 60; ++k) {
    const SystemParams sys = random_system(rng);
    const auto c = coefficients(sys, theta(rng));
    EXPECT_GE(c.b_coef, 0.0);
    EXPECT_NEAR(c.b0 + c.b1, c.b_coef, 1e-12 * (1 + c.b_coef));
    EXPECT_NE(c.gamma.has_value(), c.kappa.has_value());
    EXPECT_EQ(c.threshold_regime(), c.gamma.has_value());
    if (c.a_coef <= 0.0) {
      EXPECT_TRUE(c.tau_10.is_never());
    }
    EXPECT_EQ(c.v0, sys.r_s);
  }
}

TEST(Coefficients, StationarityAtInteriorOptimum) {
  const SystemParams sys = threshold_point();
  const V1Solution raw = solve_v1(sys, 0.2);
  ASSERT_TRUE(raw.tau_10.is_finite());
  ASSERT_GT(raw.tau_10.duration(), 0.0);
  const auto c = coefficients_from_v1(sys, 0.2, raw);
  const double rho = sys.rho();
  const double lhs = sys.mu * c.a_coef;
  const double rhs = (rho + sys.mu) * c.b1 * std::exp(-rho * raw.tau_10.duration());
  EXPECT_NEAR(lhs, rhs, 1e-6);
  EXPECT_NEAR(*c.gamma, raw.tau_10.duration(), 1e-6);
  EXPECT_EQ(c.tau_10, WaitDecision::after(*c.gamma));
}

TEST(OptimalWait, ThresholdRegime) {
  const auto c = coefficients(threshold_point(), 0.2);
  ASSERT_TRUE(c.gamma.has_value());
  const double g = *c.gamma;
  EXPECT_EQ(optimal_wait(c, F, 0.0), WaitDecision::immediately());
  EXPECT_EQ(optimal_wait(c, B, 0.0), c.tau_10);
  for (double u = 0.05; u < 3.0; u += 0.05) {
    EXPECT_EQ(optimal_wait(c, F, u), WaitDecision::immediately());
    EXPECT_NEAR(optimal_wait(c, B, u).duration(), std::max(0.0, g - u), 1e-12);
  }
}

TEST(OptimalWait, SwitchingRegime) {
  const auto c = coefficients(canonical(), 0.977);
  ASSERT_TRUE(c.kappa.has_value());
  const double k = *c.kappa;
  EXPECT_EQ(optimal_wait(c, F, 0.0), WaitDecision::immediately());
  EXPECT_EQ(optimal_wait(c, F, k), WaitDecision::immediately());
  EXPECT_EQ(optimal_wait(c, F, std::nextafter(k, 1e9)), WaitDecision::never());
  for (double u : {0.0, 0.5, k, 10.0}) EXPECT_TRUE(optimal_wait(c, B, u).is_never());
}

TEST(OptimalWait, ContinuousAcrossZeroA) {
  // tiny |A| on either side: the busy wait and the free switching age both run off to infinity
  const SystemParams sys = canonical();
  const double theta = 0.8;
  const double v1_zero = sys.lambda * theta / sys.mu / sys.machine.pi_busy() - sys.c_d;
  for (double eps : {1e-9, -1e-9}) {
    const auto c = coefficients_from_v1(sys, theta, {v1_zero - eps, WaitDecision::never()});
    EXPECT_EQ(c.threshold_regime(), eps > 0);
    EXPECT_EQ(optimal_wait(c, F, 5.0), WaitDecision::immediately());
    const WaitDecision busy = optimal_wait(c, B, 5.0);
    EXPECT_TRUE(busy.is_never() || busy.duration() > 20.0);
  }
  const auto c0 = coefficients_from_v1(sys, theta, {v1_zero, WaitDecision::never()});
  if (c0.a_coef == 0.0) {
    EXPECT_TRUE(std::isinf(*c0.kappa));
  }
}

TEST(ExpectedValue, MatchesQuadratureOnRandomPoints) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> scale(0.3, 1.5);
  int threshold = 0, switching = 0;
  for (int k = 0; k < 50; ++k) {
    const SystemParams sys = random_system(rng);
    const double th = solve_theta_star(sys).theta_star * scale(rng);
    const auto c = coefficients(sys, th);
    (c.threshold_regime() ? threshold : switching)++;
    const auto ev = expected_value(sys, c);
    EXPECT_NEAR(ev.ev0, oracles::quad_expected_value(sys, c, F), 1e-7);
    EXPECT_NEAR(ev.ev1, oracles::quad_expected_value(sys, c, B), 1e-7);
  }
  EXPECT_GT(threshold, 0);
  EXPECT_GT(switching, 0);
}

TEST(ExpectedValue, ClippedThreshold) {
  const SystemParams sys(0.2, 0.5, 0.05, 3.0, 2.0, 0.2);
  const auto c = coefficients(sys, 2.0);
  ASSERT_TRUE(c.gamma.has_value());
  ASSERT_EQ(*c.gamma, 0.0);
  const auto ev = expected_value(sys, c);
  EXPECT_NEAR(ev.ev0, oracles::quad_expected_value(sys, c, F), 1e-9);
  EXPECT_NEAR(ev.ev1, oracles::quad_expected_value(sys, c, B), 1e-9);
}

TEST(ValueRecursion, MatchesMonteCarloRollout) {
  for (const SystemParams& sys : {canonical(), threshold_point()}) {
    const auto sol = solve_theta_star(sys);
    const auto& c = sol.coeffs;
    std::uint64_t seed = 100;
    for (auto i : {F, B}) {
      for (double u : {0.0, 0.4, 1.7}) {
        const WaitDecision tau = optimal_wait(c, i, u);
        const double exact = value_recursion(sys, sol.theta_star, i, u, tau, c.v0, c.v1);
        const auto mc =
            oracles::mc_value_rollout(sys, sol.theta_star, i, u, tau, c.tau_10, 200000, seed++);
        EXPECT_NEAR(mc.mean, exact, 4 * mc.std_error) << "state " << index(i) << " age " << u;
      }
    }
  }
}

TEST(Absorption, FrozenProbabilities) {
  // first-step analysis solved with numpy
  const auto p = absorption_probabilities(canonical());
  EXPECT_NEAR(p.p0, 0.3125, 1e-14);
  EXPECT_NEAR(absorption_probabilities(fast_busy()).p0, 0.170454545454545, 1e-14);
  EXPECT_NEAR(p.p0 + p.p1, 1.0, 1e-15);
}

TEST(Absorption, SumsToOneAndStaysInRange) {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 100; ++k) {
    const auto p = absorption_probabilities(random_system(rng));
    EXPECT_NEAR(p.p0 + p.p1, 1.0, 1e-10);
    EXPECT_GE(p.p0, 0.0);
    EXPECT_GE(p.p1, 0.0);
  }
}

TEST(Absorption, NoSamplingKeepsBusyEstimate) {
  const auto p = absorption_probabilities(SystemParams(0.2, 0.5, 1e-9, 0.3, 2.0, 3.0));
  EXPECT_NEAR(p.p1, 1.0, 1e-7);
}

TEST(Absorption, GeneratorRowsBalance) {
  const auto chain = absorbing_chain(canonical());
  for (int s = 0; s < 4; ++s) {
    double sum = chain.absorption_rates[s][0] + chain.absorption_rates[s][1];
    for (int t = 0; t < 4; ++t) sum += chain.sub_generator[s][t];
    EXPECT_NEAR(sum, 0.0, 1e-15);
  }
}

TEST(Absorption, MatchesMonteCarlo) {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 4; ++k) {
    const SystemParams sys = random_system(rng);
    const auto p = absorption_probabilities(sys);
    const auto mc = oracles::mc_absorption_free(sys, 400000, 77 + k);
    EXPECT_NEAR(mc.p(), p.p0, 4 * std::sqrt(p.p0 * p.p1 / 400000.0));
  }
}

TEST(ThetaSearch, RootProperties) {
  for (const SystemParams& sys : {canonical(), fast_busy(), threshold_point()}) {
    const auto sol = solve_theta_star(sys, 1e-9);
    EXPECT_GT(sol.theta_star, 0.0);
    EXPECT_LE(sol.theta_star, sys.r_s);
    EXPECT_LE(std::abs(j_theta(sys, sol.theta_star)), 1e-9);
    for (int k = 1; k <= 10; ++k) {
      const double lo = sol.theta_star * (1.0 - 0.09 * k);
      const double hi = sol.theta_star * (1.0 + 0.09 * k);
      EXPECT_GT(j_theta(sys, lo), 0.0);
      EXPECT_LT(j_theta(sys, hi), 0.0);
    }
  }
}

TEST(ThetaSearch, JDecreasesWithUnitSlopeOrFaster) {
  const SystemParams sys = fast_busy();
  double prev = j_theta(sys, 0.01);
  for (double th = 0.05; th < 3.0; th += 0.05) {
    const double j = j_theta(sys, th);
    EXPECT_LE(j, prev - 0.04 + 1e-12);
    prev = j;
  }
}

TEST(ThetaSearch, FrozenBruteForceRoots) {
  // scipy: per-age numerical maximization, adaptive quadrature over the age density, brentq
  EXPECT_NEAR(solve_theta_star(canonical()).theta_star, 0.977552220, 5e-9);
  EXPECT_NEAR(solve_theta_star(fast_busy()).theta_star, 0.609985379, 5e-9);
}

TEST(ThetaSearch, UnreachableToleranceEndsAtAdjacentDoubles) {
  // J is often exactly zero at the root; otherwise the bracket collapses
  for (const SystemParams& sys : {canonical(), fast_busy(), threshold_point()}) {
    const double ref = solve_theta_star(sys).theta_star;
    try {
      const auto sol = solve_theta_star(sys, 1e-300);
      EXPECT_EQ(sol.j_at_root, 0.0);
      EXPECT_NEAR(sol.theta_star, ref, 1e-8);
    } catch (const ConvergenceError& e) {
      EXPECT_LE(e.lower(), ref + 1e-8);
      EXPECT_GE(e.upper(), ref - 1e-8);
      EXPECT_LE(e.upper() - e.lower(), 4 * std::numeric_limits<double>::epsilon() * ref);
    }
  }
  EXPECT_THROW(solve_theta_star(canonical(), 0.0), std::domain_error);
  EXPECT_THROW(solve_theta_star(canonical(), -1e-9), std::domain_error);
}
