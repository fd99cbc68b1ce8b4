#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace mmrev::harness {

struct ValidationOptions {
  std::uint64_t seed = 1;
  /// Negative control: perturbs the solved A coefficient before the
  /// closed-form expectation checks run.
  bool corrupt_coefficients = false;
  std::uint64_t sim_arrivals = 1000000;
  std::uint64_t mc_trials = 1000000;
  std::uint64_t ks_arrivals = 400000;  // enough for ~1e5 acceptances on both presets
};

struct CheckResult {
  std::string name;
  bool passed;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool all_passed() const;
};

/// Runs the cross-module oracle suite on the preset parameter sets.
/// Monte Carlo checks use a 4-sigma band so verdicts do not depend on the seed.
ValidationReport run_validation(const ValidationOptions& options = {});

nlohmann::json to_json(const ValidationReport& report);

}  // namespace mmrev::harness
