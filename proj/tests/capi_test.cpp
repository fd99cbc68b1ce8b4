#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "mmrev/mmrev.h"

namespace {

const mmrev_system kCanonical{0.2, 0.5, 0.5, 0.3, 2.0, 3.0};

}  // namespace

TEST(CApi, VersionAndStatusStrings) {
  EXPECT_STREQ(mmrev_version(), "0.1.0");
  EXPECT_STREQ(mmrev_status_string(MMREV_NO_CONVERGENCE), "no convergence");
}

TEST(CApi, TransitionMatrix) {
  double p[4];
  ASSERT_EQ(mmrev_transition_matrix(0.5, 0.5, std::log(2.0), p), MMREV_OK);
  EXPECT_NEAR(p[0], 0.75, 1e-12);
  EXPECT_NEAR(p[3], 0.75, 1e-12);
  EXPECT_EQ(mmrev_transition_matrix(0.5, 0.5, -1.0, p), MMREV_DOMAIN_ERROR);
  EXPECT_STRNE(mmrev_last_error(), "");
  EXPECT_EQ(mmrev_transition_matrix(0.5, 0.5, 1.0, nullptr), MMREV_INVALID_ARGUMENT);
}

TEST(CApi, SolveAndDecide) {
  mmrev_policy* pol = nullptr;
  ASSERT_EQ(mmrev_policy_solve(&kCanonical, 1e-9, &pol), MMREV_OK);
  double theta = 0;
  ASSERT_EQ(mmrev_policy_theta_star(pol, &theta), MMREV_OK);
  double j = 1;
  ASSERT_EQ(mmrev_j_theta(&kCanonical, theta, &j), MMREV_OK);
  EXPECT_LE(std::abs(j), 1e-9);

  mmrev_coefficients c;
  ASSERT_EQ(mmrev_policy_coefficients(pol, &c), MMREV_OK);
  EXPECT_NE(c.has_gamma, c.has_kappa);
  EXPECT_EQ(c.tau_10.kind, MMREV_ACTION_NEVER);

  mmrev_action a;
  ASSERT_EQ(mmrev_policy_decide(pol, 0, 0.0, &a), MMREV_OK);
  EXPECT_EQ(a.kind, MMREV_ACTION_WAIT);
  EXPECT_EQ(a.duration, 0.0);
  ASSERT_EQ(mmrev_policy_decide(pol, 1, 0.3, &a), MMREV_OK);
  EXPECT_EQ(a.kind, MMREV_ACTION_NEVER);
  EXPECT_EQ(mmrev_policy_decide(pol, 2, 0.0, &a), MMREV_INVALID_ARGUMENT);
  EXPECT_EQ(mmrev_policy_decide(pol, 0, -1.0, &a), MMREV_DOMAIN_ERROR);
  mmrev_policy_destroy(pol);
}

TEST(CApi, BenchmarkHandles) {
  mmrev_policy_kind k;
  ASSERT_EQ(mmrev_policy_kind_parse("rl", &k), MMREV_OK);
  EXPECT_EQ(mmrev_policy_kind_parse("nope", &k), MMREV_UNKNOWN_POLICY);
  mmrev_policy* pol = nullptr;
  ASSERT_EQ(mmrev_policy_create(&kCanonical, k, &pol), MMREV_OK);
  mmrev_action a;
  ASSERT_EQ(mmrev_policy_decide(pol, 1, 0.0, &a), MMREV_OK);
  EXPECT_EQ(a.kind, MMREV_ACTION_REJECT);
  double theta;
  EXPECT_EQ(mmrev_policy_theta_star(pol, &theta), MMREV_INVALID_ARGUMENT);
  mmrev_policy_destroy(pol);
}

TEST(CApi, InvalidSystem) {
  mmrev_system bad = kCanonical;
  bad.mu = 0.0;
  mmrev_policy* pol = nullptr;
  EXPECT_EQ(mmrev_policy_solve(&bad, 1e-9, &pol), MMREV_DOMAIN_ERROR);
  EXPECT_EQ(pol, nullptr);
}

TEST(CApi, SimulateIsDeterministic) {
  const mmrev_sim_config cfg{kCanonical, MMREV_POLICY_OPT_WAIT, 100000, 0.0, 5};
  mmrev_sim_stats a, b;
  ASSERT_EQ(mmrev_simulate(&cfg, &a), MMREV_OK);
  ASSERT_EQ(mmrev_simulate(&cfg, &b), MMREV_OK);
  EXPECT_EQ(a.revenue_per_job, b.revenue_per_job);
  EXPECT_EQ(a.total_arrivals, 100000u);
  EXPECT_NEAR(a.revenue_per_job, a.theta_star, 5 * a.revenue_stderr);
}

TEST(CApi, SolveReportJson) {
  char* json = nullptr;
  ASSERT_EQ(mmrev_solve_report_json(&kCanonical, 1e-9, &json), MMREV_OK);
  const std::string s(json);
  mmrev_string_free(json);
  EXPECT_NE(s.find("\"theta_star\""), std::string::npos);
  EXPECT_NE(s.find("\"kappa\""), std::string::npos);
}

TEST(CApi, SweepWritesFilesAndRejectsEmptyPolicies) {
  const std::string csv = "capi_sweep_test.csv", svg = "capi_sweep_test.svg";
  std::remove(csv.c_str());
  std::remove(svg.c_str());
  const char* spec =
      R"({"figure":"fig6b","sweep_grid":[1,3],"policies":["opt_wait","rl"],"arrivals_per_point":5000})";
  char* summary = nullptr;
  ASSERT_EQ(mmrev_sweep_run(spec, csv.c_str(), svg.c_str(), 2, &summary), MMREV_OK);
  mmrev_string_free(summary);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "sweep_var,value,policy,revenue_per_job,stderr,theta_star,S,D,N,seed");
  EXPECT_TRUE(std::ifstream(svg).good());

  std::remove(csv.c_str());
  EXPECT_EQ(mmrev_sweep_run(R"({"policies":[]})", csv.c_str(), nullptr, 1, nullptr),
            MMREV_INVALID_ARGUMENT);
  EXPECT_FALSE(std::ifstream(csv).good());
  EXPECT_EQ(mmrev_sweep_run("{not json", nullptr, nullptr, 1, nullptr), MMREV_INVALID_ARGUMENT);
  EXPECT_EQ(mmrev_sweep_run(spec, "/nonexistent-dir/x.csv", nullptr, 1, nullptr), MMREV_IO_ERROR);
}

TEST(CApi, ValidateVerdicts) {
  int passed = 0;
  ASSERT_EQ(mmrev_validate(7, 0, &passed, nullptr), MMREV_OK);
  EXPECT_EQ(passed, 1);
  ASSERT_EQ(mmrev_validate(7, 1, &passed, nullptr), MMREV_OK);
  EXPECT_EQ(passed, 0);
}
