#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "lfo/harness.hpp"

namespace lfo::cli {

namespace detail {

inline unsigned default_parallelism() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// --beta / --l0 overrides apply to every Lévy-driven config in the list;
/// plain SA has no flight parameters to patch.
inline void patch_levy(AlgorithmConfig& config, std::optional<double> beta,
                       std::optional<double> l0) {
  std::visit(
      [&](auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, LfoBConfig> ||
                      std::is_same_v<T, LfoLsConfig> ||
                      std::is_same_v<T, LfoMlsConfig> ||
                      std::is_same_v<T, LfoIlsConfig>) {
          if (beta) c.levy.beta = *beta;
          if (l0) c.levy.l0 = *l0;
        } else if constexpr (std::is_same_v<T, LfoSaConfig>) {
          if (beta) c.mls.levy.beta = *beta;
          if (l0) c.mls.levy.l0 = *l0;
        }
      },
      config);
}

inline void write_experiment_files(const std::vector<LabeledTrace>& traces,
                                   const std::filesystem::path& trace_path,
                                   const std::filesystem::path& summary_path,
                                   const std::string& format) {
  const AggregateResult summary = aggregate_traces(traces);
  std::ofstream trace_file(trace_path, std::ios::binary);
  if (!trace_file)
    throw std::runtime_error("cannot open " + trace_path.string());
  std::ofstream summary_file(summary_path, std::ios::binary);
  if (!summary_file)
    throw std::runtime_error("cannot open " + summary_path.string());
  if (format == "jsonl") {
    write_trace_jsonl(traces, trace_file);
    write_summary_jsonl(summary, summary_file);
  } else {
    write_trace_csv(traces, trace_file);
    write_summary_csv(summary, summary_file);
  }
}

inline void print_final_summary(const AggregateResult& summary,
                                std::ostream& out) {
  if (summary.rows.empty()) return;
  const std::uint64_t last = summary.rows.back().checkpoint_evals;
  out << "best at " << last << " evals:\n";
  for (const auto& r : summary.rows) {
    if (r.checkpoint_evals != last) continue;
    out << "  " << r.function << " " << r.algorithm << ": mean " << r.mean_best
        << " std " << r.std_best << " median " << r.median_best << " min "
        << r.min_best << " (n=" << r.n << ")\n";
  }
}

struct SampleArgs {
  double beta = 1.5;
  double l0 = 1.0;
  std::uint64_t count = 1000;
  std::uint64_t seed = 42;
  std::string out_path;
  std::string config_path;
};

struct RunArgs {
  std::string function;
  std::optional<std::size_t> dim;
  std::vector<std::string> algorithms;
  std::optional<double> beta;
  std::optional<double> l0;
  std::optional<std::uint64_t> budget_evals;
  std::optional<std::int64_t> budget_ms;
  std::uint32_t replications = 1;
  std::uint64_t seed = 42;
  std::string boundary = "clip";
  std::string out_prefix = "run";
  std::string format = "csv";
  unsigned parallelism = default_parallelism();
  std::string config_path;
};

struct SuiteArgs {
  std::string out_dir = "suite-out";
  std::uint64_t budget_evals = 200000;
  std::uint64_t seed = 42;
  std::string format = "csv";
  unsigned parallelism = default_parallelism();
  std::string config_path;
};

// ---------------------------------------------------------------------------
// Config files: flat key=value lines mirroring the long flag names (no
// dashes). '#'/';' lines are comments. A key is applied only when its flag
// was absent from the command line, so flags always win. CLI11's own config
// machinery is not used here: it only reads config options attached to the
// top-level app, and ours belong to subcommands.

inline std::vector<std::pair<std::string, std::string>> read_config_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::vector<std::pair<std::string, std::string>> items;
  const auto trim = [](const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
  };
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config file: expected key=value, got '" + t + "'");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty())
      throw ConfigError("config file: missing key in '" + t + "'");
    items.emplace_back(key, trim(t.substr(eq + 1)));
  }
  return items;
}

inline double config_real(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config file: bad number for " + key + ": '" + value +
                      "'");
  }
}

inline std::uint64_t config_uint(const std::string& key,
                                 const std::string& value) {
  try {
    if (!value.empty() && value[0] == '-') throw std::invalid_argument(value);
    std::size_t pos = 0;
    const std::uint64_t v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config file: bad count for " + key + ": '" + value +
                      "'");
  }
}

inline std::int64_t config_int(const std::string& key,
                               const std::string& value) {
  try {
    std::size_t pos = 0;
    const std::int64_t v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config file: bad integer for " + key + ": '" + value +
                      "'");
  }
}

inline void apply_sample_config(const CLI::App& cmd, SampleArgs& a) {
  if (a.config_path.empty()) return;
  for (const auto& [key, value] : read_config_file(a.config_path)) {
    if (key == "beta") {
      if (!cmd.count("--beta")) a.beta = config_real(key, value);
    } else if (key == "l0") {
      if (!cmd.count("--l0")) a.l0 = config_real(key, value);
    } else if (key == "count") {
      if (!cmd.count("--count")) a.count = config_uint(key, value);
    } else if (key == "seed") {
      if (!cmd.count("--seed")) a.seed = config_uint(key, value);
    } else if (key == "out") {
      if (!cmd.count("--out")) a.out_path = value;
    } else {
      throw ConfigError("config file: unknown key '" + key + "'");
    }
  }
}

inline void apply_run_config(const CLI::App& cmd, RunArgs& a) {
  if (a.config_path.empty()) return;
  const bool cli_budget =
      cmd.count("--budget-evals") > 0 || cmd.count("--budget-ms") > 0;
  bool file_evals = false, file_ms = false;
  for (const auto& [key, value] : read_config_file(a.config_path)) {
    if (key == "function") {
      if (!cmd.count("--function")) a.function = value;
    } else if (key == "dim") {
      if (!cmd.count("--dim"))
        a.dim = static_cast<std::size_t>(config_uint(key, value));
    } else if (key == "algorithm") {
      if (!cmd.count("--algorithm")) a.algorithms.push_back(value);
    } else if (key == "beta") {
      if (!cmd.count("--beta")) a.beta = config_real(key, value);
    } else if (key == "l0") {
      if (!cmd.count("--l0")) a.l0 = config_real(key, value);
    } else if (key == "budget-evals") {
      if (!cli_budget) {
        a.budget_evals = config_uint(key, value);
        file_evals = true;
      }
    } else if (key == "budget-ms") {
      if (!cli_budget) {
        a.budget_ms = config_int(key, value);
        file_ms = true;
      }
    } else if (key == "replications") {
      if (!cmd.count("--replications"))
        a.replications = static_cast<std::uint32_t>(config_uint(key, value));
    } else if (key == "seed") {
      if (!cmd.count("--seed")) a.seed = config_uint(key, value);
    } else if (key == "boundary") {
      if (value != "clip" && value != "resample")
        throw ConfigError("config file: boundary must be clip or resample");
      if (!cmd.count("--boundary")) a.boundary = value;
    } else if (key == "out") {
      if (!cmd.count("--out")) a.out_prefix = value;
    } else if (key == "format") {
      if (value != "csv" && value != "jsonl")
        throw ConfigError("config file: format must be csv or jsonl");
      if (!cmd.count("--format")) a.format = value;
    } else if (key == "parallelism") {
      const std::uint64_t p = config_uint(key, value);
      if (p < 1) throw ConfigError("config file: parallelism must be >= 1");
      if (!cmd.count("--parallelism")) a.parallelism = static_cast<unsigned>(p);
    } else {
      throw ConfigError("config file: unknown key '" + key + "'");
    }
  }
  if (file_evals && file_ms)
    throw ConfigError(
        "config file: budget-evals and budget-ms are mutually exclusive");
}

inline void apply_suite_config(const CLI::App& cmd, SuiteArgs& a) {
  if (a.config_path.empty()) return;
  for (const auto& [key, value] : read_config_file(a.config_path)) {
    if (key == "out-dir") {
      if (!cmd.count("--out-dir")) a.out_dir = value;
    } else if (key == "budget-evals") {
      if (!cmd.count("--budget-evals")) a.budget_evals = config_uint(key, value);
    } else if (key == "seed") {
      if (!cmd.count("--seed")) a.seed = config_uint(key, value);
    } else if (key == "format") {
      if (value != "csv" && value != "jsonl")
        throw ConfigError("config file: format must be csv or jsonl");
      if (!cmd.count("--format")) a.format = value;
    } else if (key == "parallelism") {
      const std::uint64_t p = config_uint(key, value);
      if (p < 1) throw ConfigError("config file: parallelism must be >= 1");
      if (!cmd.count("--parallelism")) a.parallelism = static_cast<unsigned>(p);
    } else {
      throw ConfigError("config file: unknown key '" + key + "'");
    }
  }
}

inline void cmd_list(std::ostream& out) {
  out << "objectives:\n";
  for (const auto& spec : objective_catalog()) {
    const Objective obj = make_objective(spec.name);
    const SearchSpace& space = obj.space();
    out << "  " << spec.name << "  dim " << spec.default_dim
        << (spec.fixed_dim ? " (fixed)" : " (default)") << "  bounds ["
        << space.lower[0] << ", " << space.upper[0] << "]";
    if (obj.known_best_value()) out << "  best " << *obj.known_best_value();
    if (space.constraint) out << "  constrained";
    out << "\n";
  }
  out << "algorithms:\n";
  for (std::string_view name : algorithm_names())
    out << "  " << name << "\n";
}

inline void cmd_sample(const SampleArgs& args, std::ostream& out) {
  LevyParams params;
  params.beta = args.beta;
  params.l0 = args.l0;
  params.validate();
  if (args.count < 1) throw ConfigError("sample: count must be >= 1");

  std::ofstream file;
  std::ostream* sink = &out;
  if (!args.out_path.empty()) {
    file.open(args.out_path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open " + args.out_path);
    sink = &file;
  }
  RandomSource rng(args.seed);
  *sink << "index,length\n";
  for (std::uint64_t i = 0; i < args.count; ++i)
    *sink << i << ',' << lfo::detail::format_double(sample_length(params, rng))
          << '\n';
  if (!*sink) throw std::runtime_error("sample: sink write failed");
}

inline void cmd_run(const RunArgs& args, std::ostream& out) {
  if (args.function.empty())
    throw ConfigError("run: --function is required (flag or config file)");
  ExperimentConfig config;
  config.objective = args.function;
  config.dim = args.dim;
  config.replications = args.replications;
  config.master_seed = args.seed;
  config.boundary = args.boundary == "resample" ? BoundaryPolicy::resample()
                                                : BoundaryPolicy::clip();
  if (args.budget_evals && args.budget_ms)
    throw ConfigError("--budget-evals and --budget-ms are mutually exclusive");
  if (args.budget_ms)
    config.stop.max_time_ms = *args.budget_ms;
  else
    config.stop.max_evals = args.budget_evals.value_or(200000);
  config.checkpoints =
      default_checkpoint_schedule(config.stop.max_evals.value_or(200000));

  const Objective objective = config.make_objective();  // validates name/dim
  const std::vector<std::string> names =
      args.algorithms.empty()
          ? std::vector<std::string>(algorithm_names().begin(),
                                     algorithm_names().end())
          : args.algorithms;
  for (const auto& name : names) {
    AlgorithmConfig a = default_algorithm_config(name, objective.space());
    patch_levy(a, args.beta, args.l0);
    config.algorithms.push_back(std::move(a));
  }

  const std::vector<LabeledTrace> traces =
      run_experiment(config, args.parallelism);
  const std::string ext = args.format == "jsonl" ? ".jsonl" : ".csv";
  const std::filesystem::path trace_path = args.out_prefix + "_trace" + ext;
  const std::filesystem::path summary_path = args.out_prefix + "_summary" + ext;
  write_experiment_files(traces, trace_path, summary_path, args.format);
  out << "wrote " << trace_path.string() << "\n";
  out << "wrote " << summary_path.string() << "\n";
  print_final_summary(aggregate_traces(traces), out);
}

inline void cmd_suite(const SuiteArgs& args, std::ostream& out) {
  std::filesystem::create_directories(args.out_dir);
  const std::string ext = args.format == "jsonl" ? ".jsonl" : ".csv";
  for (ExperimentConfig config : paper_suite(args.seed, args.budget_evals)) {
    const std::vector<LabeledTrace> traces =
        run_experiment(config, args.parallelism);
    const std::filesystem::path dir(args.out_dir);
    const auto trace_path = dir / (config.objective + "_trace" + ext);
    const auto summary_path = dir / (config.objective + "_summary" + ext);
    write_experiment_files(traces, trace_path, summary_path, args.format);
    out << config.objective << ": wrote " << trace_path.string() << ", "
        << summary_path.string() << "\n";
  }
}

}  // namespace detail

/// Parses `args` (without the program name) and executes one subcommand.
/// Returns the process exit code: 0 success, 1 configuration error, 2
/// runtime error.
inline int run(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"Lévy-flight global optimization toolkit"};
  app.require_subcommand(1);

  CLI::App* list = app.add_subcommand("list", "show objectives and algorithms");

  detail::SampleArgs sample;
  CLI::App* sample_cmd =
      app.add_subcommand("sample", "draw flight lengths to CSV");
  sample_cmd->add_option("--beta", sample.beta, "power index");
  sample_cmd->add_option("--l0", sample.l0, "scale factor");
  sample_cmd->add_option("--count", sample.count, "number of draws");
  sample_cmd->add_option("--seed", sample.seed, "rng seed");
  sample_cmd->add_option("--out", sample.out_path, "output file (default stdout)");
  sample_cmd->add_option("--config", sample.config_path,
                         "key=value file; flags take precedence");

  detail::RunArgs run_args;
  CLI::App* run_cmd = app.add_subcommand("run", "run one experiment");
  run_cmd->add_option("--function", run_args.function, "objective name");
  run_cmd->add_option("--dim", run_args.dim, "dimension");
  run_cmd->add_option("--algorithm", run_args.algorithms,
                      "algorithm name (repeatable; default all)");
  run_cmd->add_option("--beta", run_args.beta, "power index override");
  run_cmd->add_option("--l0", run_args.l0, "scale factor override");
  auto* evals_opt = run_cmd->add_option("--budget-evals",
                                        run_args.budget_evals,
                                        "evaluation budget");
  run_cmd->add_option("--budget-ms", run_args.budget_ms, "time budget (ms)")
      ->excludes(evals_opt);
  run_cmd->add_option("--replications", run_args.replications, "replications");
  run_cmd->add_option("--seed", run_args.seed, "master seed");
  run_cmd->add_option("--boundary", run_args.boundary, "boundary policy")
      ->check(CLI::IsMember({"clip", "resample"}));
  run_cmd->add_option("--out", run_args.out_prefix, "output path prefix");
  run_cmd->add_option("--format", run_args.format, "output format")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  run_cmd->add_option("--parallelism", run_args.parallelism, "worker threads")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--config", run_args.config_path,
                      "key=value file; flags take precedence");

  detail::SuiteArgs suite;
  CLI::App* suite_cmd =
      app.add_subcommand("suite", "run the full benchmark suite");
  suite_cmd->add_option("--out-dir", suite.out_dir, "output directory");
  suite_cmd->add_option("--budget-evals", suite.budget_evals,
                        "evaluation budget per replication");
  suite_cmd->add_option("--seed", suite.seed, "master seed");
  suite_cmd->add_option("--format", suite.format, "output format")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  suite_cmd->add_option("--parallelism", suite.parallelism, "worker threads")
      ->check(CLI::PositiveNumber);
  suite_cmd->add_option("--config", suite.config_path,
                        "key=value file; flags take precedence");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("lfo");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (list->parsed()) detail::cmd_list(out);
    if (sample_cmd->parsed()) {
      detail::apply_sample_config(*sample_cmd, sample);
      detail::cmd_sample(sample, out);
    }
    if (run_cmd->parsed()) {
      detail::apply_run_config(*run_cmd, run_args);
      detail::cmd_run(run_args, out);
    }
    if (suite_cmd->parsed()) {
      detail::apply_suite_config(*suite_cmd, suite);
      detail::cmd_suite(suite, out);
    }
    return 0;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace lfo::cli
