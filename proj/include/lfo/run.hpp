#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lfo/objective.hpp"

namespace lfo {

/// Why and when an optimization run ends. At least one of the two hard
/// budgets (evaluations, wall time) must be set; the other criteria are
/// optional extras.
struct StoppingCriteria {
  std::optional<std::uint64_t> max_evals;
  std::optional<std::int64_t> max_time_ms;
  std::optional<double> target_value;  // stop once best <= target + 1e-12
  std::optional<std::uint64_t> non_improvement_limit;

  void validate() const {
    if (!max_evals && !max_time_ms)
      throw ConfigError("StoppingCriteria: need max_evals and/or max_time_ms");
    if (max_evals && *max_evals == 0)
      throw ConfigError("StoppingCriteria: max_evals must be >= 1");
    if (max_time_ms && *max_time_ms < 1)
      throw ConfigError("StoppingCriteria: max_time_ms must be >= 1");
    if (non_improvement_limit && *non_improvement_limit == 0)
      throw ConfigError("StoppingCriteria: non_improvement_limit must be >= 1");
  }
};

/// min of two optional limits, treating absent as unbounded.
inline std::optional<std::uint64_t> combined_limit(
    std::optional<std::uint64_t> a, std::optional<std::uint64_t> b) {
  if (a && b) return std::min(*a, *b);
  return a ? a : b;
}

struct TraceCheckpoint {
  std::uint64_t evals = 0;
  std::int64_t elapsed_ms = 0;
  double best_value = 0.0;
};

/// Best-so-far record of one seeded run, sampled at a fixed schedule of
/// evaluation counts. If the run terminates before the last threshold the
/// remaining checkpoints carry the final best (the curve is flat after
/// termination), so every replication shares one schedule.
struct ConvergenceTrace {
  std::vector<TraceCheckpoint> checkpoints;
  EvaluatedPoint final_best;
  std::uint64_t seed = 0;
  std::uint64_t evals_used = 0;
};

/// 20 log-spaced thresholds from 100 (or the whole budget, if smaller) up
/// to and including the budget.
inline std::vector<std::uint64_t> default_checkpoint_schedule(
    std::uint64_t budget_evals, std::size_t count = 20,
    std::uint64_t first = 100) {
  if (budget_evals == 0)
    throw ConfigError("checkpoint schedule: budget must be >= 1");
  std::vector<std::uint64_t> out;
  if (budget_evals <= first || count <= 1) {
    out.push_back(budget_evals);
    return out;
  }
  const double lo = std::log(static_cast<double>(first));
  const double hi = std::log(static_cast<double>(budget_evals));
  for (std::size_t i = 0; i < count; ++i) {
    const double f =
        std::exp(lo + (hi - lo) * static_cast<double>(i) /
                          static_cast<double>(count - 1));
    const auto t = static_cast<std::uint64_t>(std::llround(f));
    if (out.empty() || t > out.back()) out.push_back(t);
  }
  if (out.back() < budget_evals)
    out.push_back(budget_evals);
  else
    out.back() = budget_evals;
  return out;
}

/// Shared bookkeeping for one run: counts every objective call, tracks the
/// best-so-far point, fires trace checkpoints when the count crosses
/// schedule thresholds, and answers "may I evaluate again?" from the
/// stopping criteria. Implements EvalSink so nested local searches charge
/// the same budget.
///
/// Phase caps (used by the two-phase hybrid) temporarily tighten the
/// evaluation/time budget without ending the run.
class RunTracker : public EvalSink {
 public:
  using Clock = std::chrono::steady_clock;

  RunTracker(const Objective& objective, const StoppingCriteria& stop,
             std::span<const std::uint64_t> schedule,
             Clock::time_point origin = Clock::now())
      : objective_(objective),
        stop_(stop),
        schedule_(schedule.begin(), schedule.end()),
        origin_(origin) {
    stop_.validate();
    for (std::size_t i = 1; i < schedule_.size(); ++i)
      if (schedule_[i] <= schedule_[i - 1])
        throw ConfigError("checkpoint schedule must be strictly increasing");
    if (stop_.max_evals && !schedule_.empty() &&
        schedule_.back() > *stop_.max_evals)
      throw ConfigError("checkpoint schedule exceeds the evaluation budget");
  }

  const Objective& objective() const noexcept { return objective_; }
  const StoppingCriteria& stop() const noexcept { return stop_; }

  bool can_evaluate() const override {
    if (stop_.max_evals && used_ >= *stop_.max_evals) return false;
    if (phase_eval_cap_ && used_ >= *phase_eval_cap_) return false;
    if (target_reached_) return false;
    // The very first evaluation is always allowed so a run produces a best
    // point even under a degenerate time budget.
    if (used_ > 0 && time_limit_hit()) return false;
    return true;
  }

  double evaluate(const Point& x) override {
    const std::uint64_t hard_cap = hard_eval_cap();
    if (used_ >= hard_cap)
      throw std::logic_error("RunTracker: evaluation past the budget");
    ++used_;
    const double v = objective_(x);
    if (!best_ || v < best_->value) best_ = EvaluatedPoint{x, v};
    if (stop_.target_value && best_->value <= *stop_.target_value + 1e-12)
      target_reached_ = true;
    if (next_checkpoint_ < schedule_.size() &&
        used_ == schedule_[next_checkpoint_]) {
      trace_.push_back({used_, elapsed_ms(), best_->value});
      ++next_checkpoint_;
    }
    return v;
  }

  std::uint64_t evals_used() const override { return used_; }
  bool should_stop() const { return !can_evaluate(); }
  bool target_reached() const noexcept { return target_reached_; }

  const std::optional<EvaluatedPoint>& best() const noexcept { return best_; }

  std::int64_t elapsed_ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() -
                                                                 origin_)
        .count();
  }

  void set_phase_eval_cap(std::optional<std::uint64_t> cap) {
    phase_eval_cap_ = cap;
  }
  void set_phase_time_cap_ms(std::optional<std::int64_t> ms) {
    phase_time_cap_ms_ = ms;
  }

  /// Seals the run: unreached schedule thresholds are recorded with the
  /// final best, and the trace is returned.
  ConvergenceTrace finish(std::uint64_t seed) {
    if (!best_)
      throw std::logic_error("RunTracker: run evaluated no point at all");
    const std::int64_t now_ms = elapsed_ms();
    for (; next_checkpoint_ < schedule_.size(); ++next_checkpoint_)
      trace_.push_back({schedule_[next_checkpoint_], now_ms, best_->value});
    return ConvergenceTrace{std::move(trace_), *best_, seed, used_};
  }

 private:
  std::uint64_t hard_eval_cap() const {
    std::uint64_t cap = stop_.max_evals.value_or(
        std::numeric_limits<std::uint64_t>::max());
    if (phase_eval_cap_) cap = std::min(cap, *phase_eval_cap_);
    return cap;
  }

  bool time_limit_hit() const {
    if (!stop_.max_time_ms && !phase_time_cap_ms_) return false;
    const std::int64_t now = elapsed_ms();
    if (stop_.max_time_ms && now >= *stop_.max_time_ms) return true;
    if (phase_time_cap_ms_ && now >= *phase_time_cap_ms_) return true;
    return false;
  }

  const Objective& objective_;
  StoppingCriteria stop_;
  std::vector<std::uint64_t> schedule_;
  Clock::time_point origin_;
  std::uint64_t used_ = 0;
  std::size_t next_checkpoint_ = 0;
  std::optional<EvaluatedPoint> best_;
  bool target_reached_ = false;
  std::vector<TraceCheckpoint> trace_;
  std::optional<std::uint64_t> phase_eval_cap_;
  std::optional<std::int64_t> phase_time_cap_ms_;
};

}  // namespace lfo
