#include "solver/system_params.hpp"

#include <cmath>
#include <stdexcept>

namespace mmrev {

SystemParams::SystemParams(ctmc::MachineParams m, double mu_, double lambda_, double r_s_,
                           double c_d_)
    : machine(m), mu(mu_), lambda(lambda_), r_s(r_s_), c_d(c_d_) {
  auto positive = [](double x) { return x > 0.0 && std::isfinite(x); };
  if (!positive(mu)) throw std::domain_error("query rate mu must be positive and finite");
  if (!positive(lambda)) throw std::domain_error("arrival rate lambda must be positive and finite");
  if (!positive(r_s)) throw std::domain_error("revenue r_s must be positive and finite");
  if (!(c_d >= 0.0) || !std::isfinite(c_d)) {
    throw std::domain_error("penalty c_d must be nonnegative and finite");
  }
}

}  // namespace mmrev
