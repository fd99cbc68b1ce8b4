#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <variant>
#include <vector>

#include "policies/policies.hpp"
#include "solver/policy_solver.hpp"
#include "solver/system_params.hpp"

namespace mmrev::sim {

struct MaxArrivals {
  std::uint64_t count;
};
struct MaxTime {
  double horizon;
};
/// Arrivals stop at the bound; a job still held at that point is run to
/// submission so the run always ends with an empty buffer.
using StopRule = std::variant<MaxArrivals, MaxTime>;

struct SimConfig {
  SystemParams sys;
  policies::PolicyId policy = policies::PolicyId::kOptWait;
  std::optional<solver::PolicyCoefficients> coeffs;  // required for opt_wait
  StopRule stop = MaxArrivals{100000};
  std::uint64_t seed = 1;
};

struct SimStats {
  std::uint64_t submitted_ok = 0;       // S
  std::uint64_t discarded_penalty = 0;  // D
  std::uint64_t total_arrivals = 0;     // N
  std::uint64_t rejected = 0;
  std::uint64_t lost_while_holding = 0;
  double elapsed = 0.0;
  double busy_time = 0.0;
  /// (r_s S - c_d D) / N, with a batch-means standard error.
  double revenue_per_job = 0.0;
  double revenue_stderr = 0.0;
  /// (r_s S - c_d D) / elapsed, with a batch-means standard error.
  double revenue_per_time = 0.0;
  double revenue_per_time_stderr = 0.0;
  std::uint32_t batches = 0;

  friend bool operator==(const SimStats&, const SimStats&) = default;
};

inline constexpr std::uint32_t kTargetBatches = 50;

using DecisionRule = std::function<policies::Decision(const policies::EstimateState&)>;

/// Per-run random stream derived from a 64-bit seed and a stream index.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream = 0);

SimStats run(const SimConfig& config);

/// Same engine with an arbitrary stationary rule in place of a named policy.
SimStats run(const SimConfig& config, const DecisionRule& rule);

struct AcceptanceAges {
  std::vector<double> ages;  // sorted ascending
  std::uint64_t accepted_free = 0;
  std::uint64_t accepted_busy = 0;

  /// Empirical CDF at x.
  double ecdf(double x) const;
};

AcceptanceAges estimate_age_at_acceptance(const SimConfig& config);

}  // namespace mmrev::sim
