#include "policies/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mmrev::policies {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view to_string(PolicyId id) {
  switch (id) {
    case PolicyId::kOptWait:
      return "opt_wait";
    case PolicyId::kRl:
      return "rl";
    case PolicyId::kMapRl:
      return "map_rl";
    case PolicyId::kMapWait:
      return "map_wait";
  }
  return "?";
}

PolicyId parse_policy(std::string_view name) {
  for (PolicyId id : kAllPolicies) {
    if (to_string(id) == name) return id;
  }
  throw UnknownPolicy(std::string(name));
}

std::vector<PolicyId> parse_policy_list(std::string_view list) {
  std::vector<PolicyId> out;
  while (!list.empty()) {
    const auto comma = list.find(',');
    const auto item = trim(list.substr(0, comma));
    if (!item.empty()) out.push_back(parse_policy(item));
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  return out;
}

MachineState map_estimate(const ctmc::MachineParams& params, MachineState x_hat, double age) {
  const double p_free = ctmc::transition_probability(params, x_hat, MachineState::kFree, age);
  return p_free >= 0.5 ? MachineState::kFree : MachineState::kBusy;
}

double map_busy_switch_age(const ctmc::MachineParams& params) {
  const double a = params.alpha();
  const double b = params.beta();
  if (a >= b) return kInf;
  return std::log(std::abs(2.0 * b / (b - a))) / params.rate_sum();
}

double map_free_switch_age(const ctmc::MachineParams& params) {
  const double a = params.alpha();
  const double b = params.beta();
  if (b >= a) return kInf;
  return std::log(std::abs(2.0 * a / (a - b))) / params.rate_sum();
}

Decision decide(PolicyId policy, const SystemParams& sys, const solver::PolicyCoefficients* coeffs,
                EstimateState s) {
  if (!(s.age >= 0.0)) throw std::domain_error("estimate age must be nonnegative");
  switch (policy) {
    case PolicyId::kOptWait:
      if (coeffs == nullptr) {
        throw std::invalid_argument("opt_wait needs policy coefficients");
      }
      return solver::optimal_wait(*coeffs, s.x_hat, s.age);

    case PolicyId::kRl:
      if (s.x_hat == MachineState::kFree) return WaitDecision::immediately();
      return Reject{};

    case PolicyId::kMapRl:
      if (map_estimate(sys.machine, s.x_hat, s.age) == MachineState::kFree) {
        return WaitDecision::immediately();
      }
      return Reject{};

    case PolicyId::kMapWait:
      if (s.x_hat == MachineState::kFree) {
        return s.age <= map_free_switch_age(sys.machine) ? WaitDecision::immediately()
                                                         : WaitDecision::never();
      } else {
        const double boundary = map_busy_switch_age(sys.machine);
        if (std::isinf(boundary)) return WaitDecision::never();
        return WaitDecision::after(std::max(0.0, boundary - s.age));
      }
  }
  throw UnknownPolicy("<invalid enum value>");
}

}  // namespace mmrev::policies
