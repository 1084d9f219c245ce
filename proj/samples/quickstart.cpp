// Minimal usage: run LFO-MLS on the 10-D Rastrigin function and print the
// convergence trace.
#include <cstdio>

#include "lfo/lfo.hpp"

int main() {
  const lfo::Objective objective = lfo::make_objective("f6", 10);

  auto config = std::get<lfo::LfoMlsConfig>(
      lfo::default_algorithm_config("lfo-mls", objective.space()));

  lfo::StoppingCriteria stop;
  stop.max_evals = 50000;
  const auto schedule = lfo::default_checkpoint_schedule(*stop.max_evals);

  lfo::RandomSource rng(2024);
  const lfo::ConvergenceTrace trace =
      lfo::run_lfo_mls(objective, config, stop, rng, schedule);

  std::printf("%10s  %12s\n", "evals", "best");
  for (const auto& cp : trace.checkpoints)
    std::printf("%10llu  %12.6g\n",
                static_cast<unsigned long long>(cp.evals), cp.best_value);
  std::printf("final best %.10g after %llu evaluations\n",
              trace.final_best.value,
              static_cast<unsigned long long>(trace.evals_used));
  return 0;
}
