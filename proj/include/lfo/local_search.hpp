#pragma once

#include <cstdint>
#include <stdexcept>

#include "lfo/objective.hpp"
#include "lfo/space.hpp"

namespace lfo {

/// Compass (coordinate pattern) search settings. Steps are fractions of
/// the space's largest edge, so one config works across differently sized
/// boxes.
struct LocalSearchConfig {
  double h0_fraction = 0.05;     // initial probe step
  double shrink = 0.25;          // step multiplier after a stalled sweep
  double h_min_fraction = 1e-5;  // termination step
  std::uint64_t max_evals = 20000;  // per-invocation cap

  void validate() const {
    if (!(h0_fraction > 0.0) || !(h_min_fraction > 0.0))
      throw std::domain_error("LocalSearchConfig: step fractions must be > 0");
    if (!(h_min_fraction < h0_fraction))
      throw std::domain_error(
          "LocalSearchConfig: h_min_fraction must be < h0_fraction");
    if (!(shrink > 0.0) || !(shrink < 1.0))
      throw std::domain_error("LocalSearchConfig: shrink must be in (0,1)");
    if (max_evals == 0)
      throw std::domain_error("LocalSearchConfig: max_evals must be >= 1");
  }
};

/// Derivative-free descent: probe +/-h along every coordinate axis, move
/// to the best strictly improving probe, shrink h when a sweep stalls,
/// stop when h falls below the termination step or a budget runs out.
///
/// Probes are taken in axis order, minus before plus, and ties between
/// equally improving probes go to the earliest probe, so the search is
/// deterministic for a given (start, config, budget, rng) tuple. Probe
/// feasibility goes through propose_move, which consumes rng draws only on
/// constraint fallbacks.
///
/// Every objective call is charged to `evals`; the invocation additionally
/// honors its own config.max_evals cap. The returned point is feasible and
/// never worse than `start`.
inline EvaluatedPoint local_search(const EvaluatedPoint& start,
                                   const Objective& objective,
                                   const LocalSearchConfig& config,
                                   EvalSink& evals, RandomSource& rng) {
  config.validate();
  const SearchSpace& space = objective.space();
  if (!is_feasible(space, start.point))
    throw std::domain_error("local_search: infeasible starting point");

  const double extent = space.max_extent();
  const double h_min = config.h_min_fraction * extent;
  double h = config.h0_fraction * extent;

  EvaluatedPoint current = start;
  std::uint64_t used = 0;
  const auto out_of_budget = [&] {
    return used >= config.max_evals || !evals.can_evaluate();
  };

  while (h >= h_min) {
    bool improved = false;
    EvaluatedPoint sweep_best = current;
    for (std::size_t axis = 0; axis < space.dim; ++axis) {
      for (int sign : {-1, +1}) {
        if (out_of_budget()) {
          return improved ? sweep_best : current;
        }
        Point probe = propose_move(current.point, h,
                                   UnitVector::axis(space.dim, axis, sign),
                                   space, rng);
        if (probe == current.point) continue;  // clipped to a stand-still
        const double v = evals.evaluate(probe);
        ++used;
        if (v < sweep_best.value) {
          sweep_best = {std::move(probe), v};
          improved = true;
        }
      }
    }
    if (improved)
      current = std::move(sweep_best);
    else
      h *= config.shrink;
  }
  return current;
}

}  // namespace lfo
