#pragma once

#include <array>
#include <cstdint>

#include "ctmc/wait_decision.hpp"

namespace mmrev {

/// Machine state, also used for the allocator's estimate of it.
enum class MachineState : std::uint8_t { kFree = 0, kBusy = 1 };

constexpr int index(MachineState s) { return static_cast<int>(s); }

inline MachineState state_from_index(int i) {
  if (i != 0 && i != 1) throw std::domain_error("machine state index must be 0 or 1");
  return static_cast<MachineState>(i);
}

namespace ctmc {

/// Rates of the two-state machine: `alpha` moves free -> busy (internal job
/// arrivals), `beta` moves busy -> free (service completions).
class MachineParams {
 public:
  MachineParams(double alpha, double beta);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  /// alpha + beta, the decay rate of every transient term.
  double rate_sum() const { return rate_sum_; }
  double pi_free() const { return pi_free_; }
  double pi_busy() const { return pi_busy_; }
  double stationary(MachineState s) const { return s == MachineState::kFree ? pi_free_ : pi_busy_; }

 private:
  double alpha_;
  double beta_;
  double rate_sum_;
  double pi_free_;
  double pi_busy_;
};

struct TransitionMatrix {
  std::array<std::array<double, 2>, 2> entries{};
  double t = 0.0;

  double operator()(MachineState from, MachineState to) const {
    return entries[index(from)][index(to)];
  }
};

TransitionMatrix transition_matrix(const MachineParams& params, double t);

/// Single entry P_{from,to}(t) of the transition matrix.
double transition_probability(const MachineParams& params, MachineState from, MachineState to,
                              double t);

/// E[P_{ij}(u + Y) 1{Y <= tau}] for Y ~ Exp(mu): the probability mass of seeing
/// state `to` at the first sample, given the estimate `from` of age `u` and a
/// planned wait `tau`. A Never wait integrates over the whole sample density.
double sampled_transition_weight(const MachineParams& params, double mu, MachineState from,
                                 MachineState to, double u, WaitDecision tau);

}  // namespace ctmc
}  // namespace mmrev
