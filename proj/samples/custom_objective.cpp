// Plugging a user-defined objective into the library: a 2-D Himmelblau
// function on [-6, 6]^2, compared across all six algorithms.
#include <cmath>
#include <cstdio>

#include "lfo/lfo.hpp"

int main() {
  lfo::SearchSpace space;
  space.dim = 2;
  space.lower = {-6.0, -6.0};
  space.upper = {6.0, 6.0};

  const lfo::Objective objective("himmelblau", space, [](const lfo::Point& x) {
    const double a = x[0] * x[0] + x[1] - 11.0;
    const double b = x[0] + x[1] * x[1] - 7.0;
    return a * a + b * b;
  });

  lfo::StoppingCriteria stop;
  stop.max_evals = 20000;
  const auto schedule = lfo::default_checkpoint_schedule(*stop.max_evals);

  for (std::string_view name : lfo::algorithm_names()) {
    const lfo::AlgorithmConfig config =
        lfo::default_algorithm_config(name, objective.space());
    lfo::RandomSource rng = lfo::RandomSource::for_replication(7, 0, 0);
    const lfo::ConvergenceTrace trace =
        lfo::run_algorithm(objective, config, stop, rng, schedule);
    std::printf("%-8s best %.3e at (%+.4f, %+.4f)\n",
                std::string(name).c_str(), trace.final_best.value,
                trace.final_best.point[0], trace.final_best.point[1]);
  }
  return 0;
}
