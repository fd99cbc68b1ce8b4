#pragma once

#include <string>

#include "harness/sweep.hpp"

namespace mmrev::harness {

/// Static line chart of revenue per job against the sweep variable: one
/// series per policy plus the analytical optimum as a dashed line.
std::string render_svg(const ExperimentSpec& spec, const SweepResult& result);

}  // namespace mmrev::harness
