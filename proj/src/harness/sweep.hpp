#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "harness/experiment.hpp"

namespace mmrev::harness {

struct SweepRow {
  SweepVariable variable;
  double value;
  policies::PolicyId policy;
  double revenue_per_job;
  double revenue_stderr;
  double theta_star;
  std::uint64_t submitted_ok;
  std::uint64_t discarded_penalty;
  std::uint64_t total_arrivals;
  std::uint64_t seed;
};

struct SweepPointFailure {
  double value;
  std::string message;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // ordered by (value, policy order in the spec)
  std::vector<SweepPointFailure> failures;
};

/// Worker count: MM_REVENUE_THREADS if set (>= 1), else hardware concurrency.
unsigned worker_count();

/// Seed shared by every policy at one grid point (common random numbers).
std::uint64_t point_seed(std::uint64_t base_seed, std::size_t point_index);

/// Solves and simulates every (point, policy) pair. Independent tasks run on
/// a worker pool; the row order does not depend on scheduling.
SweepResult run_sweep(const ExperimentSpec& spec, unsigned threads = 0);

inline constexpr const char* kCsvHeader =
    "sweep_var,value,policy,revenue_per_job,stderr,theta_star,S,D,N,seed";

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace mmrev::harness
