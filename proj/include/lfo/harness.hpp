#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "lfo/algorithms.hpp"
#include "lfo/objective.hpp"
#include "lfo/run.hpp"

namespace lfo {

/// One replicated benchmark: an objective, a set of algorithm configs, and
/// the seeding/budget/trace protocol shared by every replication.
struct ExperimentConfig {
  std::string objective;            // registry name
  std::optional<std::size_t> dim;   // absent = registry default
  std::vector<AlgorithmConfig> algorithms;
  std::uint32_t replications = 1;
  std::uint64_t master_seed = 0;
  StoppingCriteria stop;
  std::vector<std::uint64_t> checkpoints;
  BoundaryPolicy boundary = BoundaryPolicy::clip();

  void validate() const {
    if (algorithms.empty())
      throw ConfigError("ExperimentConfig: no algorithms selected");
    for (const auto& a : algorithms)
      std::visit([](const auto& c) { c.validate(); }, a);
    if (replications < 1)
      throw ConfigError("ExperimentConfig: replications must be >= 1");
    stop.validate();
    for (std::size_t i = 1; i < checkpoints.size(); ++i)
      if (checkpoints[i] <= checkpoints[i - 1])
        throw ConfigError(
            "ExperimentConfig: checkpoints must be strictly increasing");
    if (stop.max_evals && !checkpoints.empty() &&
        checkpoints.back() > *stop.max_evals)
      throw ConfigError("ExperimentConfig: checkpoints exceed the budget");
  }

  Objective make_objective() const {
    return lfo::make_objective(objective, dim, boundary);
  }
};

struct LabeledTrace {
  std::string function;
  std::string algorithm;
  std::size_t dim = 0;
  std::uint32_t replication = 0;
  ConvergenceTrace trace;
};

/// Runs every (algorithm, replication) cell of the experiment, up to
/// `parallelism` at a time. Replication k of algorithm index a is seeded
/// with derive_seed(master_seed, a, k), and the returned order is the
/// canonical (algorithm, replication) order, so the output is independent
/// of the parallelism degree.
inline std::vector<LabeledTrace> run_experiment(const ExperimentConfig& config,
                                                unsigned parallelism = 1) {
  config.validate();
  if (parallelism < 1)
    throw ConfigError("run_experiment: parallelism must be >= 1");
  const Objective objective = config.make_objective();

  const std::size_t n_algos = config.algorithms.size();
  const std::size_t n_tasks = n_algos * config.replications;
  std::vector<LabeledTrace> results(n_tasks);

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  const auto worker = [&]() {
    for (;;) {
      const std::size_t task = next.fetch_add(1);
      if (task >= n_tasks) return;
      {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error) return;
      }
      const std::size_t algo = task / config.replications;
      const auto rep = static_cast<std::uint32_t>(task % config.replications);
      try {
        RandomSource rng = RandomSource::for_replication(
            config.master_seed, static_cast<std::uint64_t>(algo), rep);
        ConvergenceTrace trace =
            run_algorithm(objective, config.algorithms[algo], config.stop, rng,
                          config.checkpoints);
        results[task] = LabeledTrace{
            config.objective, std::string(algorithm_name(config.algorithms[algo])),
            objective.dim(), rep, std::move(trace)};
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const std::size_t n_threads =
      std::min<std::size_t>(parallelism, std::max<std::size_t>(n_tasks, 1));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

struct AggregateRow {
  std::string function;
  std::string algorithm;
  std::uint64_t checkpoint_evals = 0;
  double mean_best = 0.0;
  double std_best = 0.0;  // population (divide by n)
  double median_best = 0.0;
  double min_best = 0.0;
  std::uint32_t n = 0;
};

struct AggregateResult {
  std::vector<AggregateRow> rows;
};

/// Per-(function, algorithm, checkpoint) statistics over replications.
/// All traces must share one checkpoint schedule.
inline AggregateResult aggregate_traces(const std::vector<LabeledTrace>& traces) {
  AggregateResult out;
  if (traces.empty()) return out;

  const auto& schedule = traces.front().trace.checkpoints;
  for (const auto& t : traces) {
    if (t.trace.checkpoints.size() != schedule.size())
      throw std::invalid_argument("aggregate_traces: mismatched schedules");
    for (std::size_t i = 0; i < schedule.size(); ++i)
      if (t.trace.checkpoints[i].evals != schedule[i].evals)
        throw std::invalid_argument("aggregate_traces: mismatched schedules");
  }

  // Group keys in first-appearance order.
  std::vector<std::pair<std::string, std::string>> groups;
  for (const auto& t : traces) {
    const std::pair<std::string, std::string> key{t.function, t.algorithm};
    if (std::find(groups.begin(), groups.end(), key) == groups.end())
      groups.push_back(key);
  }

  std::vector<double> values;
  for (const auto& [fn, algo] : groups) {
    for (std::size_t c = 0; c < schedule.size(); ++c) {
      values.clear();
      for (const auto& t : traces)
        if (t.function == fn && t.algorithm == algo)
          values.push_back(t.trace.checkpoints[c].best_value);
      const auto n = values.size();
      double mean = 0.0;
      for (double v : values) mean += v;
      mean /= static_cast<double>(n);
      double var = 0.0;
      for (double v : values) var += (v - mean) * (v - mean);
      var /= static_cast<double>(n);
      std::sort(values.begin(), values.end());
      const double median =
          n % 2 == 1 ? values[n / 2]
                     : 0.5 * (values[n / 2 - 1] + values[n / 2]);
      out.rows.push_back({fn, algo, schedule[c].evals, mean, std::sqrt(var),
                          median, values.front(),
                          static_cast<std::uint32_t>(n)});
    }
  }
  return out;
}

/// The five benchmark presets, each running all six algorithms: f0 (dim 4,
/// 100 replications), f2 (10, 100), f5 (2, 100), f6 (10, 20), bump (50,
/// 10), with a desk-scale default budget of 2e5 evaluations.
inline std::vector<ExperimentConfig> paper_suite(
    std::uint64_t master_seed = 42, std::uint64_t budget_evals = 200000) {
  struct Preset {
    const char* function;
    std::size_t dim;
    std::uint32_t replications;
  };
  static constexpr Preset presets[] = {{"f0", 4, 100},
                                       {"f2", 10, 100},
                                       {"f5", 2, 100},
                                       {"f6", 10, 20},
                                       {"bump", 50, 10}};
  std::vector<ExperimentConfig> out;
  out.reserve(std::size(presets));
  for (const auto& p : presets) {
    ExperimentConfig c;
    c.objective = p.function;
    c.dim = p.dim;
    c.replications = p.replications;
    c.master_seed = master_seed;
    c.stop.max_evals = budget_evals;
    c.checkpoints = default_checkpoint_schedule(budget_evals);
    const Objective obj = c.make_objective();
    for (std::string_view name : algorithm_names())
      c.algorithms.push_back(default_algorithm_config(name, obj.space()));
    out.push_back(std::move(c));
  }
  return out;
}

namespace detail {

/// 17 significant digits: enough to round-trip an IEEE double exactly.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline void write_trace_csv(const std::vector<LabeledTrace>& traces,
                            std::ostream& out) {
  out << "function,algorithm,dim,replication,seed,checkpoint_evals,"
         "elapsed_ms,best_value\n";
  for (const auto& t : traces)
    for (const auto& cp : t.trace.checkpoints)
      out << t.function << ',' << t.algorithm << ',' << t.dim << ','
          << t.replication << ',' << t.trace.seed << ',' << cp.evals << ','
          << cp.elapsed_ms << ',' << detail::format_double(cp.best_value)
          << '\n';
  if (!out) throw std::runtime_error("write_trace_csv: sink write failed");
}

inline void write_summary_csv(const AggregateResult& aggregate,
                              std::ostream& out) {
  out << "function,algorithm,checkpoint_evals,mean_best,std_best,median_best,"
         "min_best,n\n";
  for (const auto& r : aggregate.rows)
    out << r.function << ',' << r.algorithm << ',' << r.checkpoint_evals << ','
        << detail::format_double(r.mean_best) << ','
        << detail::format_double(r.std_best) << ','
        << detail::format_double(r.median_best) << ','
        << detail::format_double(r.min_best) << ',' << r.n << '\n';
  if (!out) throw std::runtime_error("write_summary_csv: sink write failed");
}

/// JSONL alternatives: one object per row, same field names as the CSVs.
/// Names come from the registries ([a-z0-9-]), so no JSON escaping is
/// needed.
inline void write_trace_jsonl(const std::vector<LabeledTrace>& traces,
                              std::ostream& out) {
  for (const auto& t : traces)
    for (const auto& cp : t.trace.checkpoints)
      out << "{\"function\":\"" << t.function << "\",\"algorithm\":\""
          << t.algorithm << "\",\"dim\":" << t.dim
          << ",\"replication\":" << t.replication
          << ",\"seed\":" << t.trace.seed
          << ",\"checkpoint_evals\":" << cp.evals
          << ",\"elapsed_ms\":" << cp.elapsed_ms
          << ",\"best_value\":" << detail::format_double(cp.best_value)
          << "}\n";
  if (!out) throw std::runtime_error("write_trace_jsonl: sink write failed");
}

inline void write_summary_jsonl(const AggregateResult& aggregate,
                                std::ostream& out) {
  for (const auto& r : aggregate.rows)
    out << "{\"function\":\"" << r.function << "\",\"algorithm\":\""
        << r.algorithm << "\",\"checkpoint_evals\":" << r.checkpoint_evals
        << ",\"mean_best\":" << detail::format_double(r.mean_best)
        << ",\"std_best\":" << detail::format_double(r.std_best)
        << ",\"median_best\":" << detail::format_double(r.median_best)
        << ",\"min_best\":" << detail::format_double(r.min_best)
        << ",\"n\":" << r.n << "}\n";
  if (!out) throw std::runtime_error("write_summary_jsonl: sink write failed");
}

}  // namespace lfo
