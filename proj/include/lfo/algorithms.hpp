#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "lfo/levy.hpp"
#include "lfo/local_search.hpp"
#include "lfo/objective.hpp"
#include "lfo/random.hpp"
#include "lfo/run.hpp"
#include "lfo/space.hpp"

namespace lfo {

// ---------------------------------------------------------------------------
// Per-algorithm configuration

struct LfoBConfig {
  LevyParams levy;
  std::uint32_t population = 100;

  void validate() const {
    levy.validate();
    if (population < 1)
      throw ConfigError("LfoBConfig: population must be >= 1");
  }
};

struct LfoLsConfig {
  LevyParams levy;
  // Smaller swarm than LFO-B: each candidate also pays for its own descent,
  // and the refinement cap keeps one generation from eating a whole budget.
  std::uint32_t population = 10;
  LocalSearchConfig ls = {.max_evals = 500};

  void validate() const {
    levy.validate();
    if (population < 1)
      throw ConfigError("LfoLsConfig: population must be >= 1");
    ls.validate();
  }
};

struct LfoMlsConfig {
  LevyParams levy;
  LocalSearchConfig ls;
  std::uint32_t non_improvement_jump_limit = 100;

  void validate() const {
    levy.validate();
    ls.validate();
    if (non_improvement_jump_limit < 1)
      throw ConfigError("LfoMlsConfig: jump limit must be >= 1");
  }
};

struct LfoIlsConfig {
  LevyParams levy;
  LocalSearchConfig ls;
  std::uint32_t inner_attempt_cap = 100;

  void validate() const {
    levy.validate();
    ls.validate();
    if (inner_attempt_cap < 1)
      throw ConfigError("LfoIlsConfig: inner attempt cap must be >= 1");
  }
};

struct SaConfig {
  double t0_fraction = 0.1;  // of |f(initial)|
  double ts = 1e-4;
  double move_scale = 0.05;  // of max_extent

  void validate() const {
    if (!(t0_fraction > 0.0) || !(t0_fraction <= 1.0))
      throw ConfigError("SaConfig: t0_fraction must be in (0,1]");
    if (!(ts > 0.0)) throw ConfigError("SaConfig: ts must be > 0");
    if (!(move_scale > 0.0))
      throw ConfigError("SaConfig: move_scale must be > 0");
  }
};

struct LfoSaConfig {
  LfoMlsConfig mls;
  SaConfig sa;
  double split_fraction = 0.5;  // budget share of the MLS phase

  void validate() const {
    mls.validate();
    sa.validate();
    if (!(split_fraction > 0.0) || !(split_fraction < 1.0))
      throw ConfigError("LfoSaConfig: split_fraction must be in (0,1)");
  }
};

// ---------------------------------------------------------------------------
// SA primitives

/// Power-law cooling T(t) = r^t T0 with r = exp(ln(Ts/T0)/t_m), so T(0)=T0
/// and T(t_m)=Ts.
inline double sa_temperature(double t, double t_m, double T0, double Ts) {
  if (!(T0 > 0.0) || !(Ts > 0.0))
    throw std::domain_error("sa_temperature: T0 and Ts must be positive");
  if (!(t_m > 0.0))
    throw std::domain_error("sa_temperature: t_m must be positive");
  if (!(t >= 0.0) || t > t_m)
    throw std::domain_error("sa_temperature: t outside [0, t_m]");
  return T0 * std::pow(Ts / T0, t / t_m);
}

/// Metropolis rule. Improvements pass without touching the rng; an uphill
/// move spends one uniform draw.
inline bool sa_accept(double delta, double T, RandomSource& rng) {
  if (!(T > 0.0)) throw std::domain_error("sa_accept: T must be positive");
  if (delta <= 0.0) return true;
  return rng.uniform() < std::exp(-delta / T);
}

namespace detail {

inline EvaluatedPoint random_start(RunTracker& tracker, RandomSource& rng) {
  Point x = random_feasible_point(tracker.objective().space(), rng);
  return tracker.evaluate_point(std::move(x));
}

/// One Lévy candidate from `origin`: length draw, then direction draw, then
/// the boundary-policy move. Retries inside propose_move redraw fresh Lévy
/// lengths.
inline Point levy_candidate(const Point& origin, const LevyParams& levy,
                            const SearchSpace& space, RandomSource& rng) {
  const double l = sample_length(levy, rng);
  const UnitVector dir = sample_direction(space.dim, rng);
  return propose_move(origin, l, dir, space, rng,
                      [&levy](RandomSource& r) { return sample_length(levy, r); });
}

/// Generation loop shared by LFO-B and LFO-LS; `ls` switches on the
/// per-candidate refinement.
inline void generation_loop(RunTracker& tracker, const LevyParams& levy,
                            std::uint32_t population,
                            const LocalSearchConfig* ls, RandomSource& rng) {
  const SearchSpace& space = tracker.objective().space();
  const std::optional<std::uint64_t> limit =
      tracker.stop().non_improvement_limit;
  std::uint64_t stale = 0;
  while (!tracker.should_stop() && (!limit || stale < *limit)) {
    const double best_before = tracker.best()->value;
    const Point origin = tracker.best()->point;  // fixed for the generation
    for (std::uint32_t i = 0; i < population && !tracker.should_stop(); ++i) {
      Point cand = levy_candidate(origin, levy, space, rng);
      if (!tracker.can_evaluate()) break;
      EvaluatedPoint ep = tracker.evaluate_point(std::move(cand));
      if (ls) local_search(ep, tracker.objective(), *ls, tracker, rng);
    }
    if (tracker.best()->value < best_before)
      stale = 0;
    else
      ++stale;
  }
}

/// LFO-MLS body: first descent, then { jump, descend } until the budget or
/// the stale-jump limit fires. Also the first phase of LFO-SA, which relies
/// on this producing the exact evaluation stream of a standalone MLS run
/// capped at the phase budget.
inline void mls_loop(RunTracker& tracker, const LfoMlsConfig& cfg,
                     RandomSource& rng) {
  const SearchSpace& space = tracker.objective().space();
  const std::optional<std::uint64_t> limit = combined_limit(
      tracker.stop().non_improvement_limit, cfg.non_improvement_jump_limit);
  EvaluatedPoint current = random_start(tracker, rng);
  if (!tracker.should_stop())
    current = local_search(current, tracker.objective(), cfg.ls, tracker, rng);
  std::uint64_t stale = 0;
  while (!tracker.should_stop() && stale < *limit) {
    const double best_before = tracker.best()->value;
    Point cand = levy_candidate(current.point, cfg.levy, space, rng);
    if (!tracker.can_evaluate()) break;
    // The jump is accepted unconditionally; selection pressure comes only
    // from the best-so-far bookkeeping.
    current = tracker.evaluate_point(std::move(cand));
    current = local_search(current, tracker.objective(), cfg.ls, tracker, rng);
    if (tracker.best()->value < best_before)
      stale = 0;
    else
      ++stale;
  }
}

/// SA body from an already-evaluated incumbent. `phase_start_*` anchor the
/// cooling clock so the hybrid's second phase cools over its own slice.
inline void sa_loop(RunTracker& tracker, const SaConfig& cfg,
                    EvaluatedPoint incumbent, RandomSource& rng,
                    std::uint64_t phase_start_evals,
                    std::int64_t phase_start_ms) {
  const SearchSpace& space = tracker.objective().space();
  const StoppingCriteria& stop = tracker.stop();
  const bool evals_govern = stop.max_evals.has_value();
  double t_m;
  if (evals_govern)
    t_m = static_cast<double>(*stop.max_evals - phase_start_evals);
  else
    t_m = static_cast<double>(*stop.max_time_ms - phase_start_ms);
  t_m = std::max(t_m, 1.0);

  const double T0 = std::max(cfg.t0_fraction * std::abs(incumbent.value), 1e-6);
  const double move_cap = cfg.move_scale * space.max_extent();
  const auto uniform_move = [move_cap](RandomSource& r) {
    return (1.0 - r.uniform()) * move_cap;  // (0, move_cap]
  };

  const std::optional<std::uint64_t> limit = stop.non_improvement_limit;
  std::uint64_t stale = 0;
  while (!tracker.should_stop() && (!limit || stale < *limit)) {
    double t = evals_govern
                   ? static_cast<double>(tracker.evals_used() -
                                         phase_start_evals)
                   : static_cast<double>(tracker.elapsed_ms() -
                                         phase_start_ms);
    const double T = sa_temperature(std::clamp(t, 0.0, t_m), t_m,
                                    T0, cfg.ts);
    const double best_before = tracker.best()->value;
    const double l = uniform_move(rng);
    const UnitVector dir = sample_direction(space.dim, rng);
    Point cand = propose_move(incumbent.point, l, dir, space, rng,
                              uniform_move);
    if (!tracker.can_evaluate()) break;
    EvaluatedPoint ep = tracker.evaluate_point(std::move(cand));
    if (sa_accept(ep.value - incumbent.value, T, rng))
      incumbent = std::move(ep);
    if (tracker.best()->value < best_before)
      stale = 0;
    else
      ++stale;
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Runners

inline ConvergenceTrace run_lfo_b(const Objective& objective,
                                  const LfoBConfig& config,
                                  const StoppingCriteria& stop,
                                  RandomSource& rng,
                                  std::span<const std::uint64_t> checkpoints) {
  config.validate();
  RunTracker tracker(objective, stop, checkpoints);
  detail::random_start(tracker, rng);
  detail::generation_loop(tracker, config.levy, config.population, nullptr,
                          rng);
  return tracker.finish(rng.seed());
}

inline ConvergenceTrace run_lfo_ls(const Objective& objective,
                                   const LfoLsConfig& config,
                                   const StoppingCriteria& stop,
                                   RandomSource& rng,
                                   std::span<const std::uint64_t> checkpoints) {
  config.validate();
  RunTracker tracker(objective, stop, checkpoints);
  detail::random_start(tracker, rng);
  detail::generation_loop(tracker, config.levy, config.population, &config.ls,
                          rng);
  return tracker.finish(rng.seed());
}

inline ConvergenceTrace run_lfo_mls(const Objective& objective,
                                    const LfoMlsConfig& config,
                                    const StoppingCriteria& stop,
                                    RandomSource& rng,
                                    std::span<const std::uint64_t> checkpoints) {
  config.validate();
  RunTracker tracker(objective, stop, checkpoints);
  detail::mls_loop(tracker, config, rng);
  return tracker.finish(rng.seed());
}

inline ConvergenceTrace run_lfo_ils(const Objective& objective,
                                    const LfoIlsConfig& config,
                                    const StoppingCriteria& stop,
                                    RandomSource& rng,
                                    std::span<const std::uint64_t> checkpoints) {
  config.validate();
  RunTracker tracker(objective, stop, checkpoints);
  const SearchSpace& space = objective.space();
  const std::optional<std::uint64_t> limit = stop.non_improvement_limit;

  EvaluatedPoint current = detail::random_start(tracker, rng);
  if (!tracker.should_stop())
    current = local_search(current, objective, config.ls, tracker, rng);
  std::uint64_t stale = 0;
  while (!tracker.should_stop() && (!limit || stale < *limit)) {
    const double best_before = tracker.best()->value;
    // One length per episode; each attempt redraws only the direction and
    // must beat the current local optimum's raw value to end the episode.
    const double l = sample_length(config.levy, rng);
    std::optional<EvaluatedPoint> jumped;
    for (std::uint32_t attempt = 0; attempt < config.inner_attempt_cap;
         ++attempt) {
      const UnitVector dir = sample_direction(space.dim, rng);
      Point cand = propose_move(
          current.point, l, dir, space, rng,
          [&](RandomSource& r) { return sample_length(config.levy, r); });
      if (!tracker.can_evaluate()) break;
      jumped = tracker.evaluate_point(std::move(cand));
      if (jumped->value < current.value) break;
    }
    if (!jumped) break;  // budget died before any attempt landed
    current = local_search(*jumped, objective, config.ls, tracker, rng);
    if (tracker.best()->value < best_before)
      stale = 0;
    else
      ++stale;
  }
  return tracker.finish(rng.seed());
}

inline ConvergenceTrace run_sa(const Objective& objective,
                               const SaConfig& config,
                               const StoppingCriteria& stop, RandomSource& rng,
                               std::span<const std::uint64_t> checkpoints) {
  config.validate();
  RunTracker tracker(objective, stop, checkpoints);
  EvaluatedPoint init = detail::random_start(tracker, rng);
  detail::sa_loop(tracker, config, std::move(init), rng, 0, 0);
  return tracker.finish(rng.seed());
}

inline ConvergenceTrace run_lfo_sa(const Objective& objective,
                                   const LfoSaConfig& config,
                                   const StoppingCriteria& stop,
                                   RandomSource& rng,
                                   std::span<const std::uint64_t> checkpoints) {
  config.validate();
  RunTracker tracker(objective, stop, checkpoints);

  // Phase 1: MLS on a split_fraction slice of the governing budget.
  if (stop.max_evals) {
    const auto cap = static_cast<std::uint64_t>(
        config.split_fraction * static_cast<double>(*stop.max_evals));
    tracker.set_phase_eval_cap(std::max<std::uint64_t>(cap, 1));
  } else {
    const auto cap = static_cast<std::int64_t>(
        config.split_fraction * static_cast<double>(*stop.max_time_ms));
    tracker.set_phase_time_cap_ms(std::max<std::int64_t>(cap, 1));
  }
  detail::mls_loop(tracker, config.mls, rng);
  tracker.set_phase_eval_cap(std::nullopt);
  tracker.set_phase_time_cap_ms(std::nullopt);

  // Phase 2: SA from the best point the MLS phase found, cooling over the
  // remaining budget. No re-evaluation: the hand-over is free.
  EvaluatedPoint handover = *tracker.best();
  detail::sa_loop(tracker, config.sa, std::move(handover), rng,
                  tracker.evals_used(), tracker.elapsed_ms());
  return tracker.finish(rng.seed());
}

// ---------------------------------------------------------------------------
// Registry

using AlgorithmConfig = std::variant<LfoBConfig, LfoLsConfig, LfoMlsConfig,
                                     LfoIlsConfig, SaConfig, LfoSaConfig>;

inline const std::array<std::string_view, 6>& algorithm_names() {
  static const std::array<std::string_view, 6> names = {
      "lfo-b", "lfo-ls", "lfo-mls", "lfo-ils", "sa", "lfo-sa"};
  return names;
}

inline std::string_view algorithm_name(const AlgorithmConfig& config) {
  struct Visitor {
    std::string_view operator()(const LfoBConfig&) const { return "lfo-b"; }
    std::string_view operator()(const LfoLsConfig&) const { return "lfo-ls"; }
    std::string_view operator()(const LfoMlsConfig&) const { return "lfo-mls"; }
    std::string_view operator()(const LfoIlsConfig&) const { return "lfo-ils"; }
    std::string_view operator()(const SaConfig&) const { return "sa"; }
    std::string_view operator()(const LfoSaConfig&) const { return "lfo-sa"; }
  };
  return std::visit(Visitor{}, config);
}

/// Experiment defaults: heavy tail beta 1.5, characteristic length a tenth
/// of the widest box edge, jumps capped at half of it.
inline LevyParams default_levy_params(const SearchSpace& space) {
  LevyParams levy;
  levy.beta = 1.5;
  levy.l0 = 0.1 * space.max_extent();
  levy.l_max = 0.5 * space.max_extent();
  return levy;
}

inline AlgorithmConfig default_algorithm_config(std::string_view name,
                                                const SearchSpace& space) {
  const LevyParams levy = default_levy_params(space);
  if (name == "lfo-b") return LfoBConfig{levy, 100};
  if (name == "lfo-ls") return LfoLsConfig{levy};
  if (name == "lfo-mls") return LfoMlsConfig{levy, {}, 100};
  if (name == "lfo-ils") return LfoIlsConfig{levy, {}, 100};
  if (name == "sa") return SaConfig{};
  if (name == "lfo-sa")
    return LfoSaConfig{LfoMlsConfig{levy, {}, 100}, SaConfig{}, 0.5};
  throw ConfigError("unknown algorithm '" + std::string(name) +
                    "' (expected lfo-b, lfo-ls, lfo-mls, lfo-ils, sa, lfo-sa)");
}

inline ConvergenceTrace run_algorithm(const Objective& objective,
                                      const AlgorithmConfig& config,
                                      const StoppingCriteria& stop,
                                      RandomSource& rng,
                                      std::span<const std::uint64_t> checkpoints) {
  struct Visitor {
    const Objective& objective;
    const StoppingCriteria& stop;
    RandomSource& rng;
    std::span<const std::uint64_t> checkpoints;

    ConvergenceTrace operator()(const LfoBConfig& c) const {
      return run_lfo_b(objective, c, stop, rng, checkpoints);
    }
    ConvergenceTrace operator()(const LfoLsConfig& c) const {
      return run_lfo_ls(objective, c, stop, rng, checkpoints);
    }
    ConvergenceTrace operator()(const LfoMlsConfig& c) const {
      return run_lfo_mls(objective, c, stop, rng, checkpoints);
    }
    ConvergenceTrace operator()(const LfoIlsConfig& c) const {
      return run_lfo_ils(objective, c, stop, rng, checkpoints);
    }
    ConvergenceTrace operator()(const SaConfig& c) const {
      return run_sa(objective, c, stop, rng, checkpoints);
    }
    ConvergenceTrace operator()(const LfoSaConfig& c) const {
      return run_lfo_sa(objective, c, stop, rng, checkpoints);
    }
  };
  return std::visit(Visitor{objective, stop, rng, checkpoints}, config);
}

}  // namespace lfo
