#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mmrev {

/// How long the allocator holds a job before submitting it.
///
/// `never()` means "do not submit until the next sample arrives", after which
/// the policy is consulted again. It is a first-class outcome, not an infinite
/// float, so every formula that consumes a wait has to provide its limit.
class WaitDecision {
 public:
  static WaitDecision after(double duration) {
    if (!(duration >= 0.0) || !std::isfinite(duration)) {
      throw std::domain_error("wait duration must be finite and nonnegative");
    }
    return WaitDecision(duration);
  }
  static WaitDecision immediately() { return WaitDecision(0.0); }
  static WaitDecision never() { return WaitDecision(); }

  bool is_never() const { return never_; }
  bool is_finite() const { return !never_; }

  double duration() const {
    if (never_) throw std::logic_error("duration() called on a Never wait");
    return duration_;
  }

  // Never compares as +infinity; convenient for ordering and plotting only.
  double as_double() const {
    return never_ ? std::numeric_limits<double>::infinity() : duration_;
  }

  friend bool operator==(const WaitDecision&, const WaitDecision&) = default;

 private:
  WaitDecision() : never_(true) {}
  explicit WaitDecision(double d) : never_(false), duration_(d) {}

  bool never_ = false;
  double duration_ = 0.0;
};

}  // namespace mmrev
