#pragma once

#include "ctmc/ctmc.hpp"

namespace mmrev {

/// Machine rates plus the allocator-side parameters: query rate `mu`, external
/// job arrival rate `lambda`, revenue `r_s` per successful submission and
/// penalty `c_d` per submission that hits a busy machine.
struct SystemParams {
  ctmc::MachineParams machine;
  double mu;
  double lambda;
  double r_s;
  double c_d;

  SystemParams(ctmc::MachineParams machine, double mu, double lambda, double r_s, double c_d);
  SystemParams(double alpha, double beta, double mu, double lambda, double r_s, double c_d)
      : SystemParams(ctmc::MachineParams(alpha, beta), mu, lambda, r_s, c_d) {}

  double alpha() const { return machine.alpha(); }
  double beta() const { return machine.beta(); }
  double rho() const { return machine.rate_sum(); }
};

}  // namespace mmrev
