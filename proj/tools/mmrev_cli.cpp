// Command-line front end over the mmrev C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmrev/mmrev.h"

namespace {

struct CString {
  char* p = nullptr;
  ~CString() { mmrev_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

struct SystemFlags {
  mmrev_system sys{0.2, 0.5, 0.5, 0.3, 2.0, 3.0};
  std::vector<CLI::Option*> opts;

  void attach(CLI::App* app) {
    opts = {app->add_option("--alpha", sys.alpha, "free -> busy rate"),
            app->add_option("--beta", sys.beta, "busy -> free rate"),
            app->add_option("--mu", sys.mu, "sampling rate"),
            app->add_option("--lambda", sys.lambda, "job arrival rate"),
            app->add_option("--rs", sys.r_s, "reward per successful submission"),
            app->add_option("--cd", sys.c_d, "penalty per discarded job")};
    for (auto* o : opts) o->capture_default_str();
  }
};

struct Output {
  bool json = false;
  std::string out;

  void attach(CLI::App* app, const char* what) {
    app->add_flag("--json", json, "emit JSON instead of text");
    app->add_option("--out", out, what);
  }
};

int report_error(mmrev_status s) {
  std::cerr << "error: " << mmrev_status_string(s);
  if (*mmrev_last_error()) std::cerr << ": " << mmrev_last_error();
  std::cerr << '\n';
  return s == MMREV_INVALID_ARGUMENT || s == MMREV_UNKNOWN_POLICY ? 2 : 1;
}

bool emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return true;
  }
  std::ofstream f(path);
  f << text;
  if (!f) {
    std::cerr << "error: cannot write " << path << '\n';
    return false;
  }
  return true;
}

std::vector<double> parse_grid(const std::string& text) {
  // "lo:hi:n" or a comma-separated list
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    double lo = 0, hi = 0;
    int n = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> lo >> c1 >> hi >> c2 >> n) || n < 1) {
      throw CLI::ValidationError("--grid", "expected lo:hi:n");
    }
    for (int k = 0; k < n; ++k) grid.push_back(n == 1 ? lo : lo + (hi - lo) * k / (n - 1));
    return grid;
  }
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) grid.push_back(std::stod(item));
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Revenue-optimal job submission to a two-state Markov machine"};
  app.set_version_flag("--version", std::string(mmrev_version()));
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "compute the optimal policy and its revenue per job");
  SystemFlags solve_sys;
  solve_sys.attach(solve);
  double solve_tol = 1e-9;
  solve->add_option("--tol", solve_tol, "tolerance on the revenue root")->capture_default_str();
  Output solve_out;
  solve_out.attach(solve, "write the report to a file");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run the event-driven simulator for one policy");
  SystemFlags sim_sys;
  sim_sys.attach(simulate);
  std::string sim_policy = "opt_wait";
  std::uint64_t sim_seed = 1;
  std::uint64_t sim_arrivals = 1000000;
  double sim_time = 0.0;
  simulate->add_option("--policy", sim_policy, "opt_wait, rl, map_rl or map_wait")
      ->capture_default_str();
  simulate->add_option("--seed", sim_seed)->capture_default_str();
  simulate->add_option("--arrivals", sim_arrivals, "stop after this many job arrivals")
      ->capture_default_str();
  simulate->add_option("--time", sim_time, "stop at this simulated time instead");
  Output sim_out;
  sim_out.attach(simulate, "write the statistics to a file");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "sweep one parameter and compare policies");
  SystemFlags sweep_sys;
  sweep_sys.attach(sweep);
  std::string sweep_config, sweep_figure, sweep_var, sweep_grid, sweep_policies;
  std::uint64_t sweep_seed = 1, sweep_arrivals = 100000;
  double sweep_tol = 1e-9;
  unsigned sweep_threads = 0;
  std::string sweep_prefix = "sweep";
  bool sweep_json = false;
  sweep->add_option("--config", sweep_config, "JSON experiment file")->check(CLI::ExistingFile);
  sweep->add_option("--figure", sweep_figure, "preset fig4a, fig4b, fig5a, fig5b, fig6a, fig6b");
  sweep->add_option("--var", sweep_var, "mu, lambda or rs");
  sweep->add_option("--grid", sweep_grid, "lo:hi:n or comma-separated values");
  sweep->add_option("--policies", sweep_policies, "comma-separated policy list");
  auto* sweep_seed_opt = sweep->add_option("--seed", sweep_seed);
  auto* sweep_arr_opt = sweep->add_option("--arrivals", sweep_arrivals, "arrivals per point");
  auto* sweep_tol_opt = sweep->add_option("--tol", sweep_tol);
  sweep->add_option("--threads", sweep_threads, "worker threads (default MM_REVENUE_THREADS)");
  sweep->add_option("--out", sweep_prefix, "output prefix for .csv and .svg")
      ->capture_default_str();
  sweep->add_flag("--json", sweep_json, "print a JSON summary");

  // validate
  auto* validate = app.add_subcommand("validate", "run the cross-check suite");
  std::uint64_t val_seed = 1;
  bool val_corrupt = false;
  validate->add_option("--seed", val_seed)->capture_default_str();
  validate->add_flag("--corrupt", val_corrupt, "perturb a coefficient (negative control)");
  Output val_out;
  val_out.attach(validate, "write the JSON report to a file");

  CLI11_PARSE(app, argc, argv);

  if (*solve) {
    CString s;
    const mmrev_status st = solve_out.json ? mmrev_solve_report_json(&solve_sys.sys, solve_tol, &s.p)
                                           : mmrev_solve_report_text(&solve_sys.sys, solve_tol, &s.p);
    if (st != MMREV_OK) return report_error(st);
    return emit(s.str(), solve_out.out) ? 0 : 1;
  }

  if (*simulate) {
    mmrev_sim_config cfg{sim_sys.sys, MMREV_POLICY_OPT_WAIT, sim_arrivals, sim_time, sim_seed};
    mmrev_status st = mmrev_policy_kind_parse(sim_policy.c_str(), &cfg.policy);
    if (st != MMREV_OK) return report_error(st);
    CString s;
    st = mmrev_simulate_json(&cfg, &s.p);
    if (st != MMREV_OK) return report_error(st);
    if (sim_out.json) return emit(s.str(), sim_out.out) ? 0 : 1;
    const auto j = nlohmann::json::parse(s.str());
    const auto& x = j["stats"];
    std::ostringstream text;
    text << "policy            " << sim_policy << "\n"
         << "arrivals N        " << x["N"] << "\n"
         << "submitted S       " << x["S"] << "\n"
         << "discarded D       " << x["D"] << "\n"
         << "rejected          " << x["rejected"] << "\n"
         << "lost while held   " << x["lost_while_holding"] << "\n"
         << "revenue per job   " << x["revenue_per_job"].get<double>() << " +- "
         << x["revenue_stderr"].get<double>() << "\n"
         << "revenue per time  " << x["revenue_per_time"].get<double>() << "\n";
    if (j.contains("theta_star")) {
      text << "analytical optimum " << j["theta_star"].get<double>() << "\n";
    }
    return emit(text.str(), sim_out.out) ? 0 : 1;
  }

  if (*sweep) {
    nlohmann::json spec = nlohmann::json::object();
    try {
      if (!sweep_config.empty()) {
        std::ifstream f(sweep_config);
        spec = nlohmann::json::parse(f);
      }
      if (!sweep_figure.empty()) spec["figure"] = sweep_figure;
      const char* keys[] = {"alpha", "beta", "mu", "lambda", "r_s", "c_d"};
      const double values[] = {sweep_sys.sys.alpha, sweep_sys.sys.beta, sweep_sys.sys.mu,
                               sweep_sys.sys.lambda, sweep_sys.sys.r_s, sweep_sys.sys.c_d};
      for (std::size_t k = 0; k < 6; ++k) {
        if (sweep_sys.opts[k]->count()) spec[keys[k]] = values[k];
      }
      if (!sweep_var.empty()) spec["sweep_variable"] = sweep_var;
      if (!sweep_grid.empty()) spec["sweep_grid"] = parse_grid(sweep_grid);
      if (sweep->count("--policies")) {
        std::vector<std::string> names;
        std::stringstream in(sweep_policies);
        for (std::string item; std::getline(in, item, ',');) {
          if (!item.empty()) names.push_back(item);
        }
        spec["policies"] = names;
      }
      if (sweep_seed_opt->count()) spec["seed"] = sweep_seed;
      if (sweep_arr_opt->count()) spec["arrivals_per_point"] = sweep_arrivals;
      if (sweep_tol_opt->count()) spec["tol"] = sweep_tol;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 2;
    }
    const std::string csv = sweep_prefix + ".csv";
    const std::string svg = sweep_prefix + ".svg";
    CString summary;
    const mmrev_status st =
        mmrev_sweep_run(spec.dump().c_str(), csv.c_str(), svg.c_str(), sweep_threads, &summary.p);
    if (sweep_json && summary.p) std::cout << summary.str() << '\n';
    if (st != MMREV_OK) return report_error(st);
    if (!sweep_json) std::cerr << "wrote " << csv << " and " << svg << '\n';
    return 0;
  }

  if (*validate) {
    int passed = 0;
    CString s;
    const mmrev_status st = mmrev_validate(val_seed, val_corrupt ? 1 : 0, &passed, &s.p);
    if (st != MMREV_OK) return report_error(st);
    const auto j = nlohmann::json::parse(s.str());
    if (val_out.json) {
      if (!emit(s.str(), val_out.out)) return 1;
    } else {
      std::ostringstream text;
      for (const auto& c : j["checks"]) {
        text << (c["passed"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>()
             << "  " << c["detail"].get<std::string>() << '\n';
      }
      text << (passed ? "all checks passed" : "some checks FAILED") << '\n';
      if (!emit(text.str(), val_out.out)) return 1;
    }
    return passed ? 0 : 1;
  }
  return 0;
}
