#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ctmc/ctmc.hpp"
#include "oracles/oracles.hpp"

using namespace mmrev;
using ctmc::MachineParams;

namespace {
constexpr MachineState F = MachineState::kFree;
constexpr MachineState B = MachineState::kBusy;
}  // namespace

TEST(MachineParams, StationaryMasses) {
  const MachineParams m(0.2, 0.5);
  EXPECT_DOUBLE_EQ(m.rate_sum(), 0.7);
  EXPECT_NEAR(m.pi_free(), 5.0 / 7.0, 1e-15);
  EXPECT_NEAR(m.pi_busy(), 2.0 / 7.0, 1e-15);
}

TEST(MachineParams, RejectsNonPositiveRates) {
  EXPECT_THROW(MachineParams(0.0, 0.5), std::domain_error);
  EXPECT_THROW(MachineParams(0.2, -1.0), std::domain_error);
  EXPECT_THROW(MachineParams(std::nan(""), 1.0), std::domain_error);
}

TEST(TransitionMatrix, IdentityAtZero) {
  const auto p = ctmc::transition_matrix(MachineParams(0.2, 0.5), 0.0);
  EXPECT_EQ(p(F, F), 1.0);
  EXPECT_EQ(p(F, B), 0.0);
  EXPECT_EQ(p(B, F), 0.0);
  EXPECT_EQ(p(B, B), 1.0);
}

TEST(TransitionMatrix, StationaryLimit) {
  const auto p = ctmc::transition_matrix(MachineParams(0.2, 0.5), 1e3);
  for (auto from : {F, B}) {
    EXPECT_NEAR(p(from, F), 5.0 / 7.0, 1e-12);
    EXPECT_NEAR(p(from, B), 2.0 / 7.0, 1e-12);
  }
}

TEST(TransitionMatrix, SymmetricMachineAtLn2) {
  // RK4 of the forward equations gives 0.75 / 0.25
  const auto p = ctmc::transition_matrix(MachineParams(0.5, 0.5), std::log(2.0));
  EXPECT_NEAR(p(F, F), 0.75, 1e-12);
  EXPECT_NEAR(p(F, B), 0.25, 1e-12);
  const auto ref = oracles::rk4_transition(MachineParams(0.5, 0.5), std::log(2.0));
  EXPECT_NEAR(ref[0][0], 0.75, 1e-12);
}

TEST(TransitionMatrix, NegativeTimeIsDomainError) {
  EXPECT_THROW(ctmc::transition_matrix(MachineParams(0.2, 0.5), -1e-3), std::domain_error);
}

TEST(TransitionMatrix, MatchesRk4OnRandomPoints) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> rate(0.05, 3.0), time(0.0, 8.0);
  for (int k = 0; k < 40; ++k) {
    const MachineParams m(rate(rng), rate(rng));
    const double t = time(rng);
    const auto p = ctmc::transition_matrix(m, t);
    const auto ref = oracles::rk4_transition(m, t);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) EXPECT_NEAR(p.entries[i][j], ref[i][j], 1e-10);
    }
  }
}

TEST(TransitionMatrix, RowsAreDistributionsAndSemigroupHolds) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> rate(0.05, 3.0), time(0.0, 5.0);
  for (int k = 0; k < 100; ++k) {
    const MachineParams m(rate(rng), rate(rng));
    const double s = time(rng), t = time(rng);
    const auto ps = ctmc::transition_matrix(m, s);
    const auto pt = ctmc::transition_matrix(m, t);
    const auto pst = ctmc::transition_matrix(m, s + t);
    for (int i = 0; i < 2; ++i) {
      EXPECT_NEAR(ps.entries[i][0] + ps.entries[i][1], 1.0, 1e-14);
      EXPECT_GE(ps.entries[i][0], 0.0);
      EXPECT_GE(ps.entries[i][1], 0.0);
      for (int j = 0; j < 2; ++j) {
        const double prod = ps.entries[i][0] * pt.entries[0][j] + ps.entries[i][1] * pt.entries[1][j];
        EXPECT_NEAR(prod, pst.entries[i][j], 1e-13);
      }
    }
  }
}

TEST(SampledWeight, FrozenQuadratureValue) {
  // scipy quad of mu e^{-mu y} P_10(1 + y) over [0, 2]
  const double g = ctmc::sampled_transition_weight(MachineParams(0.2, 0.5), 0.5, B, F, 1.0,
                                                   WaitDecision::after(2.0));
  EXPECT_NEAR(g, 0.317128940413895, 1e-12);
}

TEST(SampledWeight, ZeroWaitHasNoMass) {
  for (auto i : {F, B}) {
    for (auto j : {F, B}) {
      EXPECT_EQ(ctmc::sampled_transition_weight(MachineParams(0.2, 0.5), 0.5, i, j, 1.0,
                                                WaitDecision::immediately()),
                0.0);
    }
  }
}

TEST(SampledWeight, NeverRowSumsToOne) {
  const MachineParams m(0.3, 0.9);
  for (auto i : {F, B}) {
    const double s = ctmc::sampled_transition_weight(m, 0.4, i, F, 0.7, WaitDecision::never()) +
                     ctmc::sampled_transition_weight(m, 0.4, i, B, 0.7, WaitDecision::never());
    EXPECT_NEAR(s, 1.0, 1e-14);
  }
}

TEST(SampledWeight, NonDecreasingInTau) {
  const MachineParams m(0.2, 0.5);
  for (auto i : {F, B}) {
    for (auto j : {F, B}) {
      double prev = 0.0;
      for (double tau = 0.0; tau <= 30.0; tau += 0.25) {
        const double g = ctmc::sampled_transition_weight(m, 0.5, i, j, 0.3, WaitDecision::after(tau));
        EXPECT_GE(g, prev - 1e-15);
        prev = g;
      }
      EXPECT_LE(prev, ctmc::sampled_transition_weight(m, 0.5, i, j, 0.3, WaitDecision::never()) + 1e-15);
    }
  }
}

TEST(SampledWeight, MatchesQuadrature) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> rate(0.05, 2.0), age(0.0, 4.0), wait(0.0, 6.0);
  for (int k = 0; k < 30; ++k) {
    const MachineParams m(rate(rng), rate(rng));
    const double mu = rate(rng), u = age(rng);
    const WaitDecision tau = k % 5 == 0 ? WaitDecision::never() : WaitDecision::after(wait(rng));
    for (auto i : {F, B}) {
      for (auto j : {F, B}) {
        EXPECT_NEAR(ctmc::sampled_transition_weight(m, mu, i, j, u, tau),
                    oracles::quad_sampled_weight(m, mu, i, j, u, tau), 1e-9);
      }
    }
  }
}

TEST(SampledWeight, RejectsBadInputs) {
  const MachineParams m(0.2, 0.5);
  EXPECT_THROW(ctmc::sampled_transition_weight(m, 0.0, F, F, 0.0, WaitDecision::never()),
               std::domain_error);
  EXPECT_THROW(ctmc::sampled_transition_weight(m, 0.5, F, F, -1.0, WaitDecision::never()),
               std::domain_error);
}

TEST(WaitDecisionTest, Semantics) {
  EXPECT_TRUE(WaitDecision::never().is_never());
  EXPECT_TRUE(std::isinf(WaitDecision::never().as_double()));
  EXPECT_EQ(WaitDecision::immediately(), WaitDecision::after(0.0));
  EXPECT_THROW(WaitDecision::after(-1.0), std::domain_error);
  EXPECT_THROW(WaitDecision::after(INFINITY), std::domain_error);
  EXPECT_THROW((void)WaitDecision::never().duration(), std::logic_error);
}
