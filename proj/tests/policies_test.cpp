#include <gtest/gtest.h>

#include <cmath>

#include "oracles/oracles.hpp"
#include "policies/policies.hpp"

using namespace mmrev;
using namespace mmrev::policies;

namespace {

constexpr MachineState F = MachineState::kFree;
constexpr MachineState B = MachineState::kBusy;

const SystemParams kSlowBusy(0.2, 0.5, 0.5, 0.3, 2.0, 3.0);
const SystemParams kFastBusy(0.5, 0.3, 0.5, 0.3, 2.0, 3.0);

WaitDecision wait_of(const Decision& d) { return std::get<WaitDecision>(d); }

}  // namespace

TEST(PolicyNames, RoundTrip) {
  for (PolicyId id : kAllPolicies) EXPECT_EQ(parse_policy(to_string(id)), id);
  EXPECT_THROW(parse_policy("greedy"), UnknownPolicy);
  EXPECT_THROW(parse_policy("OPT_WAIT"), UnknownPolicy);
  const auto list = parse_policy_list("opt_wait,map_wait");
  ASSERT_EQ(list.size(), 2u);
  EXPECT_EQ(list[1], PolicyId::kMapWait);
}

TEST(MapWait, FreeEstimateSubmitsWhenBusyDrainsFaster) {
  for (double u : {0.0, 1.0, 50.0}) {
    EXPECT_EQ(wait_of(decide(PolicyId::kMapWait, kSlowBusy, nullptr, {F, u})),
              WaitDecision::immediately());
  }
}

TEST(MapWait, BusyEstimateNeverWhenBusyIsSticky) {
  for (double u : {0.0, 3.0}) {
    EXPECT_TRUE(wait_of(decide(PolicyId::kMapWait, kFastBusy, nullptr, {B, u})).is_never());
  }
}

TEST(MapWait, BusyWaitEqualsPosteriorCrossing) {
  const double expected = std::log(10.0 / 3.0) / 0.7;
  const WaitDecision w = wait_of(decide(PolicyId::kMapWait, kSlowBusy, nullptr, {B, 0.0}));
  EXPECT_NEAR(w.duration(), expected, 1e-12);
  EXPECT_NEAR(w.duration(), 1.7200, 5e-5);
  const double root = oracles::bisect_root(
      [](double u) {
        return ctmc::transition_probability(kSlowBusy.machine, B, B, u) - 0.5;
      },
      0.0, 20.0);
  EXPECT_NEAR(root, w.duration(), 1e-10);
}

TEST(MapWait, BusyWaitHasUnitSlope) {
  const double boundary = map_busy_switch_age(kSlowBusy.machine);
  for (double u = 0.0; u < 3.0; u += 0.1) {
    EXPECT_NEAR(wait_of(decide(PolicyId::kMapWait, kSlowBusy, nullptr, {B, u})).duration(),
                std::max(0.0, boundary - u), 1e-12);
  }
}

TEST(MapWait, FreeEstimateExpiresWhenBusyIsSticky) {
  const double k = map_free_switch_age(kFastBusy.machine);
  EXPECT_NEAR(k, std::log(2.0 * 0.5 / 0.2) / 0.8, 1e-12);
  EXPECT_EQ(wait_of(decide(PolicyId::kMapWait, kFastBusy, nullptr, {F, k - 1e-9})),
            WaitDecision::immediately());
  EXPECT_TRUE(wait_of(decide(PolicyId::kMapWait, kFastBusy, nullptr, {F, k + 1e-9})).is_never());
}

TEST(MapEstimate, IdentityAtZeroAndStationaryLimit) {
  EXPECT_EQ(map_estimate(kSlowBusy.machine, B, 0.0), B);
  EXPECT_EQ(map_estimate(kSlowBusy.machine, F, 0.0), F);
  EXPECT_EQ(map_estimate(kSlowBusy.machine, B, 100.0), F);
  EXPECT_EQ(map_estimate(kFastBusy.machine, F, 100.0), B);
  const double boundary = map_busy_switch_age(kSlowBusy.machine);
  EXPECT_EQ(map_estimate(kSlowBusy.machine, B, boundary - 1e-6), B);
  EXPECT_EQ(map_estimate(kSlowBusy.machine, B, boundary + 1e-6), F);
}

TEST(MapEstimate, ExactTieResolvesToFree) {
  EXPECT_EQ(map_estimate(ctmc::MachineParams(0.4, 0.4), B, 1e6), F);
}

TEST(Rl, RejectsBusyEstimate) {
  for (double u : {0.0, 10.0}) {
    EXPECT_TRUE(is_reject(decide(PolicyId::kRl, kSlowBusy, nullptr, {B, u})));
    EXPECT_EQ(wait_of(decide(PolicyId::kRl, kSlowBusy, nullptr, {F, u})),
              WaitDecision::immediately());
  }
}

TEST(MapRl, FollowsMapEstimate) {
  EXPECT_TRUE(is_reject(decide(PolicyId::kMapRl, kSlowBusy, nullptr, {B, 1.0})));
  EXPECT_EQ(wait_of(decide(PolicyId::kMapRl, kSlowBusy, nullptr, {B, 2.0})),
            WaitDecision::immediately());
  EXPECT_TRUE(is_reject(decide(PolicyId::kMapRl, kFastBusy, nullptr, {F, 10.0})));
  // coincides with RL at age zero
  for (auto x : {F, B}) {
    EXPECT_EQ(decide(PolicyId::kMapRl, kFastBusy, nullptr, {x, 0.0}),
              decide(PolicyId::kRl, kFastBusy, nullptr, {x, 0.0}));
  }
}

TEST(OptWait, DelegatesToSolver) {
  const auto c = solver::coefficients(kSlowBusy, 0.977);
  for (auto x : {F, B}) {
    for (double u : {0.0, 1.0, 2.0}) {
      EXPECT_EQ(wait_of(decide(PolicyId::kOptWait, kSlowBusy, &c, {x, u})),
                solver::optimal_wait(c, x, u));
    }
  }
  EXPECT_THROW(decide(PolicyId::kOptWait, kSlowBusy, nullptr, {F, 0.0}), std::invalid_argument);
}
