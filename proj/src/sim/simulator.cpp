#include "sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace mmrev::sim {

namespace {

using policies::Decision;
using policies::EstimateState;
using policies::Reject;

struct Batch {
  double revenue = 0.0;
  double arrivals = 0.0;
  double duration = 0.0;
};

// Ratio-estimator standard error of sum(y)/sum(x) over batches.
double ratio_stderr(const std::vector<Batch>& batches, double ratio, double Batch::*y,
                    double Batch::*x) {
  const auto k = static_cast<double>(batches.size());
  if (batches.size() < 2) return 0.0;
  double total_x = 0.0;
  double ss = 0.0;
  for (const Batch& b : batches) {
    total_x += b.*x;
    const double r = b.*y - ratio * (b.*x);
    ss += r * r;
  }
  if (total_x <= 0.0) return 0.0;
  return std::sqrt(k / (k - 1.0) * ss) / total_x;
}

class Engine {
 public:
  using AcceptHook = std::function<void(const EstimateState&)>;

  Engine(const SimConfig& cfg, DecisionRule rule, AcceptHook on_accept)
      : cfg_(cfg),
        rule_(std::move(rule)),
        on_accept_(std::move(on_accept)),
        rng_(make_stream(cfg.seed)) {
    if (const auto* a = std::get_if<MaxArrivals>(&cfg.stop)) {
      if (a->count == 0) throw std::invalid_argument("max arrivals must be positive");
      max_arrivals_ = a->count;
    } else {
      const double h = std::get<MaxTime>(cfg.stop).horizon;
      if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("max time must be positive");
      horizon_ = h;
    }
  }

  SimStats run() {
    schedule_machine();
    push(exp(cfg_.sys.mu), Kind::kSample, 0);
    schedule_arrival();

    while (true) {
      if (arrivals_closed_ && !holding_ && (!horizon_ || now_ >= *horizon_)) break;
      const Event ev = queue_.top();
      queue_.pop();
      if (horizon_ && !holding_ && arrivals_closed_ && ev.time > *horizon_) {
        advance(*horizon_);
        break;
      }
      switch (ev.kind) {
        case Kind::kMachine:
          if (ev.generation != machine_gen_) break;
          advance(ev.time);
          busy_ = !busy_;
          schedule_machine();
          break;
        case Kind::kSample:
          advance(ev.time);
          on_sample();
          push(now_ + exp(cfg_.sys.mu), Kind::kSample, 0);
          break;
        case Kind::kArrival:
          advance(ev.time);
          on_arrival();
          break;
        case Kind::kSubmit:
          if (ev.generation != submit_gen_ || !holding_) break;
          advance(ev.time);
          submit();
          break;
      }
      if (!holding_) maybe_close_batch();
    }
    close_batch();
    return finish();
  }

 private:
  enum class Kind : std::uint8_t { kMachine, kSample, kArrival, kSubmit };
  struct Event {
    double time;
    Kind kind;
    std::uint64_t generation;
    bool operator>(const Event& o) const { return time > o.time; }
  };

  double exp(double rate) { return std::exponential_distribution<double>(rate)(rng_); }

  void push(double t, Kind k, std::uint64_t gen) { queue_.push(Event{t, k, gen}); }

  void schedule_machine() {
    ++machine_gen_;
    const double rate = busy_ ? cfg_.sys.beta() : cfg_.sys.alpha();
    push(now_ + exp(rate), Kind::kMachine, machine_gen_);
  }

  void schedule_arrival() {
    const double t = now_ + exp(cfg_.sys.lambda);
    if (horizon_ && t > *horizon_) {
      arrivals_closed_ = true;
      return;
    }
    push(t, Kind::kArrival, 0);
  }

  void advance(double t) {
    if (busy_) busy_time_ += t - now_;
    now_ = t;
  }

  EstimateState estimate() const {
    return {x_hat_busy_ ? MachineState::kBusy : MachineState::kFree, now_ - last_reset_};
  }

  void on_sample() {
    x_hat_busy_ = busy_;
    last_reset_ = now_;
    if (holding_) apply(rule_(estimate()), /*fresh_arrival=*/false);
  }

  void on_arrival() {
    ++stats_.total_arrivals;
    ++batch_.arrivals;
    if (max_arrivals_ && stats_.total_arrivals >= *max_arrivals_) {
      arrivals_closed_ = true;
    } else {
      schedule_arrival();
    }
    if (holding_) {
      ++stats_.lost_while_holding;
      return;
    }
    const EstimateState s = estimate();
    const Decision d = rule_(s);
    if (!policies::is_reject(d) && on_accept_) on_accept_(s);
    apply(d, /*fresh_arrival=*/true);
  }

  void apply(const Decision& d, bool fresh_arrival) {
    ++submit_gen_;
    if (policies::is_reject(d)) {
      // A held job can only be rejected by a custom rule; count it the same way.
      if (fresh_arrival || holding_) ++stats_.rejected;
      holding_ = false;
      return;
    }
    holding_ = true;
    const auto& wait = std::get<WaitDecision>(d);
    if (wait.is_never()) return;
    if (wait.duration() == 0.0) {
      submit();
      return;
    }
    push(now_ + wait.duration(), Kind::kSubmit, submit_gen_);
  }

  void submit() {
    if (busy_) {
      ++stats_.discarded_penalty;
      batch_.revenue -= cfg_.sys.c_d;
    } else {
      ++stats_.submitted_ok;
      batch_.revenue += cfg_.sys.r_s;
      // The accepted job occupies the machine and is served at rate beta.
      busy_ = true;
      schedule_machine();
    }
    x_hat_busy_ = true;
    last_reset_ = now_;
    holding_ = false;
    ++submit_gen_;
  }

  void maybe_close_batch() {
    const double k = static_cast<double>(batches_.size() + 1);
    bool due = false;
    if (max_arrivals_) {
      due = static_cast<double>(stats_.total_arrivals) >=
            k * static_cast<double>(*max_arrivals_) / kTargetBatches;
    } else {
      due = now_ >= k * *horizon_ / kTargetBatches;
    }
    if (due && batches_.size() + 1 < kTargetBatches) close_batch();
  }

  void close_batch() {
    batch_.duration = now_ - batch_start_;
    if (batch_.arrivals > 0.0 || batch_.duration > 0.0) batches_.push_back(batch_);
    batch_ = Batch{};
    batch_start_ = now_;
  }

  SimStats finish() {
    SimStats s = stats_;
    s.elapsed = now_;
    s.busy_time = busy_time_;
    s.batches = static_cast<std::uint32_t>(batches_.size());
    const double revenue = cfg_.sys.r_s * static_cast<double>(s.submitted_ok) -
                           cfg_.sys.c_d * static_cast<double>(s.discarded_penalty);
    if (s.total_arrivals > 0) {
      s.revenue_per_job = revenue / static_cast<double>(s.total_arrivals);
      s.revenue_stderr =
          ratio_stderr(batches_, s.revenue_per_job, &Batch::revenue, &Batch::arrivals);
    }
    if (s.elapsed > 0.0) {
      s.revenue_per_time = revenue / s.elapsed;
      s.revenue_per_time_stderr =
          ratio_stderr(batches_, s.revenue_per_time, &Batch::revenue, &Batch::duration);
    }
    return s;
  }

  const SimConfig& cfg_;
  DecisionRule rule_;
  AcceptHook on_accept_;
  std::mt19937_64 rng_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;

  std::optional<std::uint64_t> max_arrivals_;
  std::optional<double> horizon_;

  double now_ = 0.0;
  bool busy_ = true;  // start right after a submission: state (1,1)
  bool x_hat_busy_ = true;
  double last_reset_ = 0.0;
  bool holding_ = false;
  bool arrivals_closed_ = false;
  std::uint64_t machine_gen_ = 0;
  std::uint64_t submit_gen_ = 0;
  double busy_time_ = 0.0;

  SimStats stats_;
  Batch batch_;
  double batch_start_ = 0.0;
  std::vector<Batch> batches_;
};

DecisionRule policy_rule(const SimConfig& config) {
  if (config.policy == policies::PolicyId::kOptWait && !config.coeffs) {
    throw std::invalid_argument("opt_wait simulation needs policy coefficients");
  }
  return [&config](const EstimateState& s) {
    return policies::decide(config.policy, config.sys,
                            config.coeffs ? &*config.coeffs : nullptr, s);
  };
}

}  // namespace

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

SimStats run(const SimConfig& config) { return run(config, policy_rule(config)); }

SimStats run(const SimConfig& config, const DecisionRule& rule) {
  Engine engine(config, rule, nullptr);
  return engine.run();
}

double AcceptanceAges::ecdf(double x) const {
  if (ages.empty()) return 0.0;
  const auto it = std::upper_bound(ages.begin(), ages.end(), x);
  return static_cast<double>(it - ages.begin()) / static_cast<double>(ages.size());
}

AcceptanceAges estimate_age_at_acceptance(const SimConfig& config) {
  AcceptanceAges out;
  Engine engine(config, policy_rule(config), [&out](const EstimateState& s) {
    out.ages.push_back(s.age);
    if (s.x_hat == MachineState::kFree) {
      ++out.accepted_free;
    } else {
      ++out.accepted_busy;
    }
  });
  engine.run();
  std::sort(out.ages.begin(), out.ages.end());
  return out;
}

}  // namespace mmrev::sim
