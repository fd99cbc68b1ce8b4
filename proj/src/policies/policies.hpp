#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ctmc/ctmc.hpp"
#include "ctmc/wait_decision.hpp"
#include "solver/policy_solver.hpp"
#include "solver/system_params.hpp"

namespace mmrev::policies {

enum class PolicyId { kOptWait, kRl, kMapRl, kMapWait };

inline constexpr PolicyId kAllPolicies[] = {PolicyId::kOptWait, PolicyId::kRl, PolicyId::kMapRl,
                                            PolicyId::kMapWait};

class UnknownPolicy : public std::invalid_argument {
 public:
  explicit UnknownPolicy(const std::string& name)
      : std::invalid_argument("unknown policy identifier: '" + name + "'") {}
};

/// Stable identifiers: "opt_wait", "rl", "map_rl", "map_wait".
std::string_view to_string(PolicyId id);
PolicyId parse_policy(std::string_view name);
std::vector<PolicyId> parse_policy_list(std::string_view comma_separated);

/// What the allocator knows: its estimate and how old it is.
struct EstimateState {
  MachineState x_hat;
  double age;
};

/// The allocator drops the job immediately (benchmarks only).
struct Reject {
  friend bool operator==(const Reject&, const Reject&) = default;
};

using Decision = std::variant<WaitDecision, Reject>;

inline bool is_reject(const Decision& d) { return std::holds_alternative<Reject>(d); }

/// Most likely machine state after `age` time units from `x_hat`; exact ties
/// resolve to free.
MachineState map_estimate(const ctmc::MachineParams& params, MachineState x_hat, double age);

/// Age at which a busy estimate starts to favour "free" under the MAP rule,
/// +infinity when alpha >= beta.
double map_busy_switch_age(const ctmc::MachineParams& params);

/// Age after which a free estimate stops favouring "free", +infinity when
/// beta >= alpha.
double map_free_switch_age(const ctmc::MachineParams& params);

/// `coeffs` is required for kOptWait and ignored otherwise.
Decision decide(PolicyId policy, const SystemParams& sys, const solver::PolicyCoefficients* coeffs,
                EstimateState s);

}  // namespace mmrev::policies
