#include "harness/sweep.hpp"

#include <atomic>
#include <cstdlib>
#include <fmt/format.h>
#include <mutex>
#include <optional>
#include <thread>

#include "sim/simulator.hpp"

namespace mmrev::harness {

unsigned worker_count() {
  if (const char* env = std::getenv("MM_REVENUE_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && n >= 1) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::uint64_t point_seed(std::uint64_t base_seed, std::size_t point_index) {
  // splitmix64 finalizer over (seed, index)
  std::uint64_t z = base_seed + 0x9e3779b97f4a7c15ULL * (point_index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

SweepResult run_sweep(const ExperimentSpec& spec, unsigned threads) {
  spec.validate();
  const std::size_t n_points = spec.grid.size();
  const std::size_t n_policies = spec.policies.size();
  const std::size_t n_tasks = n_points * n_policies;

  std::vector<std::optional<SweepRow>> slots(n_tasks);
  std::vector<std::optional<std::string>> errors(n_points);
  std::mutex error_mutex;
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t task = next++; task < n_tasks; task = next++) {
      const std::size_t point = task / n_policies;
      const policies::PolicyId policy = spec.policies[task % n_policies];
      const double value = spec.grid[point];
      try {
        const SystemParams sys = with_value(spec.base, spec.variable, value);
        const solver::ThetaSolution sol = solver::solve_theta_star(sys, spec.tol);
        sim::SimConfig cfg{sys, policy, sol.coeffs, sim::MaxArrivals{spec.arrivals_per_point},
                           point_seed(spec.seed, point)};
        const sim::SimStats st = sim::run(cfg);
        slots[task] = SweepRow{spec.variable,       value,
                               policy,              st.revenue_per_job,
                               st.revenue_stderr,   sol.theta_star,
                               st.submitted_ok,     st.discarded_penalty,
                               st.total_arrivals,   cfg.seed};
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        if (!errors[point]) errors[point] = e.what();
      }
    }
  };

  const unsigned n_threads =
      std::max(1u, std::min<unsigned>(threads ? threads : worker_count(),
                                       static_cast<unsigned>(n_tasks)));
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();

  SweepResult result;
  for (std::size_t point = 0; point < n_points; ++point) {
    for (std::size_t k = 0; k < n_policies; ++k) {
      if (auto& row = slots[point * n_policies + k]) result.rows.push_back(*row);
    }
    if (errors[point]) result.failures.push_back({spec.grid[point], *errors[point]});
  }
  return result;
}

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kCsvHeader << '\n';
  for (const SweepRow& r : rows) {
    out << fmt::format("{},{:.10g},{},{:.10g},{:.6g},{:.12g},{},{},{},{}\n", to_string(r.variable),
                       r.value, policies::to_string(r.policy), r.revenue_per_job, r.revenue_stderr,
                       r.theta_star, r.submitted_ok, r.discarded_penalty, r.total_arrivals,
                       r.seed);
  }
}

}  // namespace mmrev::harness
