#include "mmrev/mmrev.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include "harness/experiment.hpp"
#include "harness/reports.hpp"
#include "harness/svg_chart.hpp"
#include "harness/sweep.hpp"
#include "harness/validate.hpp"
#include "policies/policies.hpp"
#include "sim/simulator.hpp"
#include "solver/policy_solver.hpp"

struct mmrev_policy {
  mmrev::SystemParams sys;
  mmrev::policies::PolicyId id;
  std::optional<mmrev::solver::ThetaSolution> solution;
};

namespace {

using namespace mmrev;

thread_local std::string g_last_error;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

mmrev_status fail(mmrev_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
mmrev_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const solver::ConvergenceError& e) {
    return fail(MMREV_NO_CONVERGENCE, e.what());
  } catch (const policies::UnknownPolicy& e) {
    return fail(MMREV_UNKNOWN_POLICY, e.what());
  } catch (const std::domain_error& e) {
    return fail(MMREV_DOMAIN_ERROR, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(MMREV_INVALID_ARGUMENT, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(MMREV_INVALID_ARGUMENT, e.what());
  } catch (const IoError& e) {
    return fail(MMREV_IO_ERROR, e.what());
  } catch (const std::exception& e) {
    return fail(MMREV_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(MMREV_INTERNAL_ERROR, "unknown exception");
  }
}

#define MMREV_REQUIRE(ptr)                                             \
  do {                                                                 \
    if ((ptr) == nullptr) {                                            \
      return fail(MMREV_INVALID_ARGUMENT, #ptr " must not be null"); \
    }                                                                  \
  } while (0)

SystemParams to_system(const mmrev_system& s) {
  return SystemParams(s.alpha, s.beta, s.mu, s.lambda, s.r_s, s.c_d);
}

policies::PolicyId to_id(mmrev_policy_kind k) {
  switch (k) {
    case MMREV_POLICY_OPT_WAIT:
      return policies::PolicyId::kOptWait;
    case MMREV_POLICY_RL:
      return policies::PolicyId::kRl;
    case MMREV_POLICY_MAP_RL:
      return policies::PolicyId::kMapRl;
    case MMREV_POLICY_MAP_WAIT:
      return policies::PolicyId::kMapWait;
  }
  throw policies::UnknownPolicy(std::to_string(static_cast<int>(k)));
}

mmrev_policy_kind to_kind(policies::PolicyId id) {
  switch (id) {
    case policies::PolicyId::kOptWait:
      return MMREV_POLICY_OPT_WAIT;
    case policies::PolicyId::kRl:
      return MMREV_POLICY_RL;
    case policies::PolicyId::kMapRl:
      return MMREV_POLICY_MAP_RL;
    case policies::PolicyId::kMapWait:
      return MMREV_POLICY_MAP_WAIT;
  }
  return MMREV_POLICY_OPT_WAIT;
}

mmrev_action to_action(const WaitDecision& w) {
  if (w.is_never()) return {MMREV_ACTION_NEVER, std::numeric_limits<double>::infinity()};
  return {MMREV_ACTION_WAIT, w.duration()};
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

sim::SimConfig to_sim_config(const mmrev_sim_config& c, std::optional<double>* theta_star) {
  sim::SimConfig cfg{to_system(c.system), to_id(c.policy), std::nullopt, sim::MaxArrivals{1},
                     c.seed};
  if (c.max_time > 0) {
    cfg.stop = sim::MaxTime{c.max_time};
  } else {
    if (c.max_arrivals == 0) throw std::invalid_argument("max_arrivals must be positive");
    cfg.stop = sim::MaxArrivals{c.max_arrivals};
  }
  if (cfg.policy == policies::PolicyId::kOptWait) {
    const auto sol = solver::solve_theta_star(cfg.sys);
    cfg.coeffs = sol.coeffs;
    if (theta_star) *theta_star = sol.theta_star;
  }
  return cfg;
}

void write_file(const char* path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError(std::string("cannot open ") + path + " for writing");
  f << content;
  if (!f) throw IoError(std::string("write failed: ") + path);
}

}  // namespace

extern "C" {

const char* mmrev_version(void) { return "0.1.0"; }

const char* mmrev_last_error(void) { return g_last_error.c_str(); }

const char* mmrev_status_string(mmrev_status status) {
  switch (status) {
    case MMREV_OK:
      return "ok";
    case MMREV_INVALID_ARGUMENT:
      return "invalid argument";
    case MMREV_DOMAIN_ERROR:
      return "domain error";
    case MMREV_NO_CONVERGENCE:
      return "no convergence";
    case MMREV_UNKNOWN_POLICY:
      return "unknown policy";
    case MMREV_IO_ERROR:
      return "i/o error";
    case MMREV_INTERNAL_ERROR:
      return "internal error";
  }
  return "unrecognized status";
}

void mmrev_string_free(char* s) { std::free(s); }

mmrev_status mmrev_policy_kind_parse(const char* name, mmrev_policy_kind* out) {
  MMREV_REQUIRE(name);
  MMREV_REQUIRE(out);
  return guarded([&] {
    *out = to_kind(policies::parse_policy(name));
    return MMREV_OK;
  });
}

const char* mmrev_policy_kind_name(mmrev_policy_kind kind) {
  switch (kind) {
    case MMREV_POLICY_OPT_WAIT:
      return "opt_wait";
    case MMREV_POLICY_RL:
      return "rl";
    case MMREV_POLICY_MAP_RL:
      return "map_rl";
    case MMREV_POLICY_MAP_WAIT:
      return "map_wait";
  }
  return nullptr;
}

mmrev_status mmrev_transition_matrix(double alpha, double beta, double t, double out[4]) {
  MMREV_REQUIRE(out);
  return guarded([&] {
    const auto p = ctmc::transition_matrix(ctmc::MachineParams(alpha, beta), t);
    out[0] = p.entries[0][0];
    out[1] = p.entries[0][1];
    out[2] = p.entries[1][0];
    out[3] = p.entries[1][1];
    return MMREV_OK;
  });
}

mmrev_status mmrev_absorption_probabilities(const mmrev_system* sys, double* p0, double* p1) {
  MMREV_REQUIRE(sys);
  MMREV_REQUIRE(p0);
  MMREV_REQUIRE(p1);
  return guarded([&] {
    const auto p = solver::absorption_probabilities(to_system(*sys));
    *p0 = p.p0;
    *p1 = p.p1;
    return MMREV_OK;
  });
}

mmrev_status mmrev_j_theta(const mmrev_system* sys, double theta, double* out) {
  MMREV_REQUIRE(sys);
  MMREV_REQUIRE(out);
  return guarded([&] {
    *out = solver::j_theta(to_system(*sys), theta);
    return MMREV_OK;
  });
}

mmrev_status mmrev_policy_solve(const mmrev_system* sys, double tol, mmrev_policy** out) {
  MMREV_REQUIRE(sys);
  MMREV_REQUIRE(out);
  return guarded([&] {
    const SystemParams s = to_system(*sys);
    *out = new mmrev_policy{s, policies::PolicyId::kOptWait, solver::solve_theta_star(s, tol)};
    return MMREV_OK;
  });
}

mmrev_status mmrev_policy_create(const mmrev_system* sys, mmrev_policy_kind kind,
                                 mmrev_policy** out) {
  MMREV_REQUIRE(sys);
  MMREV_REQUIRE(out);
  return guarded([&] {
    const SystemParams s = to_system(*sys);
    const policies::PolicyId id = to_id(kind);
    std::optional<solver::ThetaSolution> sol;
    if (id == policies::PolicyId::kOptWait) sol = solver::solve_theta_star(s);
    *out = new mmrev_policy{s, id, sol};
    return MMREV_OK;
  });
}

void mmrev_policy_destroy(mmrev_policy* policy) { delete policy; }

mmrev_status mmrev_policy_kind_of(const mmrev_policy* policy, mmrev_policy_kind* out) {
  MMREV_REQUIRE(policy);
  MMREV_REQUIRE(out);
  *out = to_kind(policy->id);
  return MMREV_OK;
}

mmrev_status mmrev_policy_theta_star(const mmrev_policy* policy, double* out) {
  MMREV_REQUIRE(policy);
  MMREV_REQUIRE(out);
  if (!policy->solution) return fail(MMREV_INVALID_ARGUMENT, "policy has no solved optimum");
  *out = policy->solution->theta_star;
  return MMREV_OK;
}

mmrev_status mmrev_policy_coefficients(const mmrev_policy* policy, mmrev_coefficients* out) {
  MMREV_REQUIRE(policy);
  MMREV_REQUIRE(out);
  if (!policy->solution) return fail(MMREV_INVALID_ARGUMENT, "policy has no coefficients");
  const auto& c = policy->solution->coeffs;
  *out = mmrev_coefficients{c.theta,
                            c.v0,
                            c.v1,
                            to_action(c.tau_10),
                            c.a_coef,
                            c.b_coef,
                            c.b0,
                            c.b1,
                            c.gamma.has_value(),
                            c.gamma.value_or(std::nan("")),
                            c.kappa.has_value(),
                            c.kappa.value_or(std::nan(""))};
  return MMREV_OK;
}

mmrev_status mmrev_policy_decide(const mmrev_policy* policy, int estimate, double age,
                                 mmrev_action* out) {
  MMREV_REQUIRE(policy);
  MMREV_REQUIRE(out);
  if (estimate != 0 && estimate != 1) {
    return fail(MMREV_INVALID_ARGUMENT, "estimate must be 0 (free) or 1 (busy)");
  }
  return guarded([&] {
    if (!(age >= 0.0) || !std::isfinite(age)) throw std::domain_error("age must be finite and >= 0");
    const auto d = policies::decide(policy->id, policy->sys,
                                    policy->solution ? &policy->solution->coeffs : nullptr,
                                    {state_from_index(estimate), age});
    if (policies::is_reject(d)) {
      *out = {MMREV_ACTION_REJECT, 0.0};
    } else {
      *out = to_action(std::get<WaitDecision>(d));
    }
    return MMREV_OK;
  });
}

mmrev_status mmrev_simulate(const mmrev_sim_config* config, mmrev_sim_stats* out) {
  MMREV_REQUIRE(config);
  MMREV_REQUIRE(out);
  return guarded([&] {
    std::optional<double> theta;
    const auto st = sim::run(to_sim_config(*config, &theta));
    *out = mmrev_sim_stats{st.submitted_ok,       st.discarded_penalty,
                           st.total_arrivals,     st.rejected,
                           st.lost_while_holding, st.elapsed,
                           st.busy_time,          st.revenue_per_job,
                           st.revenue_stderr,     st.revenue_per_time,
                           st.revenue_per_time_stderr,
                           theta.value_or(std::nan(""))};
    return MMREV_OK;
  });
}

mmrev_status mmrev_simulate_json(const mmrev_sim_config* config, char** json_out) {
  MMREV_REQUIRE(config);
  MMREV_REQUIRE(json_out);
  return guarded([&] {
    std::optional<double> theta;
    const sim::SimConfig cfg = to_sim_config(*config, &theta);
    const auto st = sim::run(cfg);
    nlohmann::json j = {{"params", harness::to_json(cfg.sys)},
                        {"policy", std::string(policies::to_string(cfg.policy))},
                        {"seed", cfg.seed},
                        {"stats", harness::to_json(st)}};
    if (theta) j["theta_star"] = *theta;
    *json_out = copy_string(j.dump(2));
    return MMREV_OK;
  });
}

mmrev_status mmrev_solve_report_json(const mmrev_system* sys, double tol, char** json_out) {
  MMREV_REQUIRE(sys);
  MMREV_REQUIRE(json_out);
  return guarded([&] {
    const auto r = harness::make_solve_report(to_system(*sys), tol);
    *json_out = copy_string(harness::to_json(r).dump(2));
    return MMREV_OK;
  });
}

mmrev_status mmrev_solve_report_text(const mmrev_system* sys, double tol, char** text_out) {
  MMREV_REQUIRE(sys);
  MMREV_REQUIRE(text_out);
  return guarded([&] {
    const auto r = harness::make_solve_report(to_system(*sys), tol);
    *text_out = copy_string(harness::to_text(r));
    return MMREV_OK;
  });
}

mmrev_status mmrev_sweep_run(const char* spec_json, const char* csv_path, const char* svg_path,
                             unsigned threads, char** summary_json) {
  MMREV_REQUIRE(spec_json);
  return guarded([&] {
    const harness::ExperimentSpec spec =
        harness::spec_from_json(nlohmann::json::parse(spec_json));
    spec.validate();
    const harness::SweepResult result = harness::run_sweep(spec, threads);

    if (csv_path) {
      std::ostringstream csv;
      harness::write_csv(csv, result.rows);
      write_file(csv_path, csv.str());
    }
    if (svg_path) write_file(svg_path, harness::render_svg(spec, result));

    if (summary_json) {
      nlohmann::json failures = nlohmann::json::array();
      for (const auto& f : result.failures) {
        failures.push_back({{"value", f.value}, {"message", f.message}});
      }
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& r : result.rows) {
        rows.push_back({{"value", r.value},
                        {"policy", std::string(policies::to_string(r.policy))},
                        {"revenue_per_job", r.revenue_per_job},
                        {"stderr", r.revenue_stderr},
                        {"theta_star", r.theta_star},
                        {"S", r.submitted_ok},
                        {"D", r.discarded_penalty},
                        {"N", r.total_arrivals},
                        {"seed", r.seed}});
      }
      *summary_json = copy_string(
          nlohmann::json{{"spec", harness::spec_to_json(spec)}, {"rows", rows},
                         {"failures", failures}}
              .dump(2));
    }
    if (!result.failures.empty()) {
      return fail(MMREV_NO_CONVERGENCE,
                  "sweep point " + std::to_string(result.failures.front().value) +
                      " failed: " + result.failures.front().message);
    }
    return MMREV_OK;
  });
}

mmrev_status mmrev_validate(uint64_t seed, int corrupt_coefficients, int* passed,
                            char** report_json) {
  MMREV_REQUIRE(passed);
  return guarded([&] {
    harness::ValidationOptions opt;
    opt.seed = seed;
    opt.corrupt_coefficients = corrupt_coefficients != 0;
    const auto report = harness::run_validation(opt);
    *passed = report.all_passed() ? 1 : 0;
    if (report_json) *report_json = copy_string(harness::to_json(report).dump(2));
    return MMREV_OK;
  });
}

}  // extern "C"
