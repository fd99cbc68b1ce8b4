/* Revenue-optimal job submission to a two-state Markov machine.
 *
 * Plain C interface over the solver, the policies and the event simulator.
 * Every call returns an mmrev_status; on failure a thread-local message is
 * available from mmrev_last_error(). Strings returned through char** are
 * owned by the caller and released with mmrev_string_free().
 */
#ifndef MMREV_MMREV_H
#define MMREV_MMREV_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(MMREV_BUILDING_LIBRARY)
#define MMREV_API __declspec(dllexport)
#else
#define MMREV_API __declspec(dllimport)
#endif
#else
#define MMREV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mmrev_status {
  MMREV_OK = 0,
  MMREV_INVALID_ARGUMENT = 1,
  MMREV_DOMAIN_ERROR = 2,
  MMREV_NO_CONVERGENCE = 3,
  MMREV_UNKNOWN_POLICY = 4,
  MMREV_IO_ERROR = 5,
  MMREV_INTERNAL_ERROR = 6
} mmrev_status;

typedef enum mmrev_policy_kind {
  MMREV_POLICY_OPT_WAIT = 0,
  MMREV_POLICY_RL = 1,
  MMREV_POLICY_MAP_RL = 2,
  MMREV_POLICY_MAP_WAIT = 3
} mmrev_policy_kind;

typedef struct mmrev_system {
  double alpha;  /* free -> busy rate */
  double beta;   /* busy -> free rate */
  double mu;     /* sampling rate */
  double lambda; /* job arrival rate */
  double r_s;    /* reward for a successful submission */
  double c_d;    /* penalty for a discarded job */
} mmrev_system;

typedef enum mmrev_action_kind {
  MMREV_ACTION_WAIT = 0, /* submit after `duration` unless a sample arrives first */
  MMREV_ACTION_NEVER = 1,
  MMREV_ACTION_REJECT = 2
} mmrev_action_kind;

typedef struct mmrev_action {
  mmrev_action_kind kind;
  double duration; /* meaningful for MMREV_ACTION_WAIT only */
} mmrev_action;

typedef struct mmrev_coefficients {
  double theta;
  double v0;
  double v1;
  mmrev_action tau_10;
  double a;
  double b;
  double b0;
  double b1;
  int has_gamma;
  double gamma;
  int has_kappa;
  double kappa; /* +inf when the switching age is never reached */
} mmrev_coefficients;

typedef struct mmrev_sim_config {
  mmrev_system system;
  mmrev_policy_kind policy;
  uint64_t max_arrivals; /* used when max_time <= 0 */
  double max_time;
  uint64_t seed;
} mmrev_sim_config;

typedef struct mmrev_sim_stats {
  uint64_t submitted_ok;
  uint64_t discarded_penalty;
  uint64_t total_arrivals;
  uint64_t rejected;
  uint64_t lost_while_holding;
  double elapsed;
  double busy_time;
  double revenue_per_job;
  double revenue_stderr;
  double revenue_per_time;
  double revenue_per_time_stderr;
  double theta_star; /* filled for opt_wait, NaN otherwise */
} mmrev_sim_stats;

/* A policy bound to one system; opt_wait handles carry solved coefficients. */
typedef struct mmrev_policy mmrev_policy;

MMREV_API const char* mmrev_version(void);
MMREV_API const char* mmrev_last_error(void);
MMREV_API const char* mmrev_status_string(mmrev_status status);
MMREV_API void mmrev_string_free(char* s);

MMREV_API mmrev_status mmrev_policy_kind_parse(const char* name, mmrev_policy_kind* out);
MMREV_API const char* mmrev_policy_kind_name(mmrev_policy_kind kind);

/* Row-major 2x2 matrix P(t), states ordered (free, busy). */
MMREV_API mmrev_status mmrev_transition_matrix(double alpha, double beta, double t,
                                               double out[4]);
MMREV_API mmrev_status mmrev_absorption_probabilities(const mmrev_system* sys, double* p0,
                                                      double* p1);
MMREV_API mmrev_status mmrev_j_theta(const mmrev_system* sys, double theta, double* out);

/* Solves for the optimal revenue per job and returns an opt_wait handle. */
MMREV_API mmrev_status mmrev_policy_solve(const mmrev_system* sys, double tol,
                                          mmrev_policy** out);
/* Benchmark handle; opt_wait is solved with the default tolerance. */
MMREV_API mmrev_status mmrev_policy_create(const mmrev_system* sys, mmrev_policy_kind kind,
                                           mmrev_policy** out);
MMREV_API void mmrev_policy_destroy(mmrev_policy* policy);
MMREV_API mmrev_status mmrev_policy_kind_of(const mmrev_policy* policy, mmrev_policy_kind* out);
MMREV_API mmrev_status mmrev_policy_theta_star(const mmrev_policy* policy, double* out);
MMREV_API mmrev_status mmrev_policy_coefficients(const mmrev_policy* policy,
                                                 mmrev_coefficients* out);
/* estimate: 0 free, 1 busy; age >= 0. */
MMREV_API mmrev_status mmrev_policy_decide(const mmrev_policy* policy, int estimate, double age,
                                           mmrev_action* out);

MMREV_API mmrev_status mmrev_simulate(const mmrev_sim_config* config, mmrev_sim_stats* out);

/* JSON reports. */
MMREV_API mmrev_status mmrev_solve_report_json(const mmrev_system* sys, double tol,
                                               char** json_out);
MMREV_API mmrev_status mmrev_solve_report_text(const mmrev_system* sys, double tol,
                                               char** text_out);
MMREV_API mmrev_status mmrev_simulate_json(const mmrev_sim_config* config, char** json_out);

/* Runs a parameter sweep described by a JSON spec. Writes the CSV and SVG
 * files when the paths are non-null, even if some grid points failed; a
 * failed point yields MMREV_NO_CONVERGENCE (or the first error) after the
 * partial results are written. `threads` of 0 uses MM_REVENUE_THREADS or the
 * hardware concurrency. */
MMREV_API mmrev_status mmrev_sweep_run(const char* spec_json, const char* csv_path,
                                       const char* svg_path, unsigned threads,
                                       char** summary_json);

/* Cross-module oracle suite; *passed is 1 iff every check passed. */
MMREV_API mmrev_status mmrev_validate(uint64_t seed, int corrupt_coefficients, int* passed,
                                      char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* MMREV_MMREV_H */
