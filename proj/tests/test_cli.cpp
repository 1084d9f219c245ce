#include <catch2/catch_amalgamated.hpp>

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lfo/cli.hpp"
#include "lfo/random.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliResult r;
  r.code = lfo::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

struct TempDir {
  fs::path path;
  TempDir() {
    static std::atomic<int> counter{0};
    path = fs::temp_directory_path() /
           ("lfo-cli-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> fields_of(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream in(line);
  std::string f;
  while (std::getline(in, f, ',')) fields.push_back(f);
  return fields;
}

/// Trace CSV with the elapsed_ms column blanked, for run-to-run compares.
std::string mask_elapsed(const std::string& csv) {
  std::string out;
  for (const auto& line : lines_of(csv)) {
    auto fields = fields_of(line);
    if (fields.size() == 8 && fields[0] != "function") fields[6] = "X";
    std::string joined;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) joined += ',';
      joined += fields[i];
    }
    out += joined + "\n";
  }
  return out;
}

}  // namespace

TEST_CASE("cli rejects empty and unknown invocations", "[cli]") {
  CHECK(run_cli({}).code == 1);
  CHECK(run_cli({"frobnicate"}).code == 1);
  CHECK_FALSE(run_cli({"frobnicate"}).err.empty());

  const CliResult help = run_cli({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("sample") != std::string::npos);
  CHECK(help.out.find("suite") != std::string::npos);
}

TEST_CASE("cli list shows the catalogs", "[cli]") {
  const CliResult r = run_cli({"list"});
  REQUIRE(r.code == 0);
  for (const char* name : {"f0", "f2", "f5", "f6", "bump"})
    CHECK(r.out.find(name) != std::string::npos);
  for (const char* name : {"lfo-b", "lfo-ls", "lfo-mls", "lfo-ils", "sa",
                           "lfo-sa"})
    CHECK(r.out.find(name) != std::string::npos);
  CHECK(r.out.find("constrained") != std::string::npos);
  CHECK(r.out.find("(fixed)") != std::string::npos);
}

TEST_CASE("cli sample writes deterministic draws", "[cli]") {
  const CliResult a = run_cli({"sample", "--count", "5", "--seed", "3"});
  REQUIRE(a.code == 0);
  const auto lines = lines_of(a.out);
  REQUIRE(lines.size() == 6);
  CHECK(lines[0] == "index,length");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = fields_of(lines[i]);
    REQUIRE(fields.size() == 2);
    CHECK(fields[0] == std::to_string(i - 1));
    CHECK(std::strtod(fields[1].c_str(), nullptr) > 0.0);
  }

  const CliResult b = run_cli({"sample", "--count", "5", "--seed", "3"});
  CHECK(a.out == b.out);
  const CliResult c = run_cli({"sample", "--count", "5", "--seed", "4"});
  CHECK(a.out != c.out);
}

TEST_CASE("cli sample writes to a file", "[cli]") {
  TempDir tmp;
  const fs::path out_path = tmp.path / "draws.csv";
  const CliResult file_run = run_cli(
      {"sample", "--count", "7", "--seed", "5", "--out", out_path.string()});
  REQUIRE(file_run.code == 0);
  const CliResult stdout_run = run_cli({"sample", "--count", "7", "--seed",
                                        "5"});
  CHECK(slurp(out_path) == stdout_run.out);
}

TEST_CASE("cli sample rejects bad parameters", "[cli]") {
  CHECK(run_cli({"sample", "--beta", "0"}).code == 1);
  CHECK(run_cli({"sample", "--beta", "-1.5"}).code == 1);
  CHECK(run_cli({"sample", "--l0", "0"}).code == 1);
  CHECK(run_cli({"sample", "--count", "0"}).code == 1);
  CHECK_FALSE(run_cli({"sample", "--beta", "0"}).err.empty());
}

TEST_CASE("cli sample heavy tails lengthen with smaller beta", "[cli]") {
  int wins = 0;
  for (int seed = 0; seed < 20; ++seed) {
    double max_heavy = 0.0, max_light = 0.0;
    const CliResult heavy =
        run_cli({"sample", "--beta", "0.5", "--count", "2000", "--seed",
                 std::to_string(seed)});
    const CliResult light =
        run_cli({"sample", "--beta", "3.0", "--count", "2000", "--seed",
                 std::to_string(seed)});
    REQUIRE(heavy.code == 0);
    REQUIRE(light.code == 0);
    const auto hl = lines_of(heavy.out);
    const auto ll = lines_of(light.out);
    for (std::size_t i = 1; i < hl.size(); ++i)
      max_heavy = std::max(max_heavy,
                           std::strtod(fields_of(hl[i])[1].c_str(), nullptr));
    for (std::size_t i = 1; i < ll.size(); ++i)
      max_light = std::max(max_light,
                           std::strtod(fields_of(ll[i])[1].c_str(), nullptr));
    if (max_heavy > max_light) ++wins;
  }
  CHECK(wins >= 19);
}

TEST_CASE("cli sample median matches the analytic value", "[cli]") {
  TempDir tmp;
  const fs::path out_path = tmp.path / "big.csv";
  const CliResult r = run_cli({"sample", "--count", "1000000", "--seed", "42",
                               "--out", out_path.string()});
  REQUIRE(r.code == 0);

  std::vector<double> lengths;
  lengths.reserve(1000000);
  std::ifstream in(out_path);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line))
    lengths.push_back(std::strtod(fields_of(line)[1].c_str(), nullptr));
  REQUIRE(lengths.size() == 1000000);
  std::nth_element(lengths.begin(), lengths.begin() + lengths.size() / 2,
                   lengths.end());
  const double median = lengths[lengths.size() / 2];
  CHECK(std::abs(median / 0.58740105196819947475 - 1.0) < 0.01);
}

TEST_CASE("cli run produces trace and summary files", "[cli]") {
  TempDir tmp;
  const std::string prefix = (tmp.path / "job").string();
  const CliResult r =
      run_cli({"run", "--function", "f6", "--dim", "2", "--algorithm",
               "lfo-mls", "--budget-evals", "5000", "--seed", "7", "--out",
               prefix});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("best at 5000 evals") != std::string::npos);

  const std::string trace = slurp(prefix + "_trace.csv");
  const auto trace_lines = lines_of(trace);
  REQUIRE(trace_lines.size() > 1);
  CHECK(trace_lines[0] ==
        "function,algorithm,dim,replication,seed,checkpoint_evals,"
        "elapsed_ms,best_value");
  for (std::size_t i = 1; i < trace_lines.size(); ++i)
    REQUIRE(trace_lines[i].rfind("f6,lfo-mls,2,0,", 0) == 0);

  const std::string summary = slurp(prefix + "_summary.csv");
  const auto summary_lines = lines_of(summary);
  CHECK(summary_lines[0] ==
        "function,algorithm,checkpoint_evals,mean_best,std_best,median_best,"
        "min_best,n");
  CHECK(summary.find("f6,lfo-mls,5000,") != std::string::npos);

  // The seed column is the derived per-replication seed.
  const auto fields = fields_of(trace_lines[1]);
  CHECK(fields[4] ==
        std::to_string(lfo::RandomSource::derive_seed(7, 0, 0)));
}

TEST_CASE("cli run is reproducible up to timing", "[cli]") {
  TempDir tmp;
  const std::string p1 = (tmp.path / "a").string();
  const std::string p2 = (tmp.path / "b").string();
  const std::vector<std::string> base{
      "run", "--function", "f6", "--dim", "3", "--algorithm", "lfo-sa",
      "--replications", "2", "--budget-evals", "4000", "--seed", "11"};

  auto with_out = [&](const std::string& prefix) {
    std::vector<std::string> args = base;
    args.push_back("--out");
    args.push_back(prefix);
    return args;
  };
  REQUIRE(run_cli(with_out(p1)).code == 0);
  REQUIRE(run_cli(with_out(p2)).code == 0);
  CHECK(mask_elapsed(slurp(p1 + "_trace.csv")) ==
        mask_elapsed(slurp(p2 + "_trace.csv")));
}

TEST_CASE("cli run defaults to all six algorithms", "[cli]") {
  TempDir tmp;
  const std::string prefix = (tmp.path / "all").string();
  const CliResult r = run_cli({"run", "--function", "f6", "--dim", "2",
                               "--budget-evals", "300", "--out", prefix});
  REQUIRE(r.code == 0);
  const std::string summary = slurp(prefix + "_summary.csv");
  for (const char* name : {"lfo-b", "lfo-ls", "lfo-mls", "lfo-ils", "sa",
                           "lfo-sa"})
    CHECK(summary.find(std::string("f6,") + name + ",") != std::string::npos);
}

TEST_CASE("cli run jsonl format", "[cli]") {
  TempDir tmp;
  const std::string prefix = (tmp.path / "j").string();
  const CliResult r =
      run_cli({"run", "--function", "f6", "--dim", "2", "--algorithm", "sa",
               "--budget-evals", "500", "--format", "jsonl", "--out", prefix});
  REQUIRE(r.code == 0);
  const std::string trace = slurp(prefix + "_trace.jsonl");
  REQUIRE_FALSE(trace.empty());
  CHECK(trace.rfind("{\"function\":\"f6\",\"algorithm\":\"sa\",\"dim\":2,",
                    0) == 0);
  const std::string summary = slurp(prefix + "_summary.jsonl");
  CHECK(summary.rfind("{\"function\":\"f6\"", 0) == 0);
}

TEST_CASE("cli run under a time budget", "[cli]") {
  TempDir tmp;
  const std::string prefix = (tmp.path / "t").string();
  const CliResult r =
      run_cli({"run", "--function", "f6", "--dim", "2", "--algorithm",
               "lfo-mls", "--budget-ms", "50", "--out", prefix});
  REQUIRE(r.code == 0);
  const auto trace_lines = lines_of(slurp(prefix + "_trace.csv"));
  // Header plus the default 20-point schedule, filled to the end.
  CHECK(trace_lines.size() == 1 + 20);
}

TEST_CASE("cli run rejects inconsistent requests", "[cli]") {
  CHECK(run_cli({"run", "--function", "f5", "--dim", "3", "--budget-evals",
                 "200"})
            .code == 1);
  CHECK(run_cli({"run", "--function", "zzz", "--budget-evals", "200"}).code ==
        1);
  CHECK(run_cli({"run", "--function", "f6", "--algorithm", "nope",
                 "--budget-evals", "200"})
            .code == 1);
  CHECK(run_cli({"run", "--function", "f6", "--budget-evals", "200",
                 "--budget-ms", "200"})
            .code == 1);
  CHECK(run_cli({"run", "--budget-evals", "200"}).code == 1);  // no function
  CHECK(run_cli({"run", "--function", "f6", "--budget-evals", "200",
                 "--boundary", "wrap"})
            .code == 1);
  CHECK(run_cli({"run", "--function", "f6", "--budget-evals", "200",
                 "--format", "xml"})
            .code == 1);
}

TEST_CASE("cli run reads a config file with flag overrides", "[cli]") {
  TempDir tmp;
  const fs::path cfg_path = tmp.path / "job.ini";
  {
    std::ofstream cfg(cfg_path);
    cfg << "function=f6\n"
        << "dim=2\n"
        << "algorithm=lfo-mls\n"
        << "budget-evals=400\n"
        << "seed=9\n";
  }

  const std::string p1 = (tmp.path / "from-config").string();
  const CliResult r1 =
      run_cli({"run", "--config", cfg_path.string(), "--out", p1});
  REQUIRE(r1.code == 0);
  const auto l1 = lines_of(slurp(p1 + "_trace.csv"));
  REQUIRE(l1.size() > 1);
  CHECK(fields_of(l1[1])[4] ==
        std::to_string(lfo::RandomSource::derive_seed(9, 0, 0)));

  // A flag on the command line beats the config file.
  const std::string p2 = (tmp.path / "override").string();
  const CliResult r2 = run_cli(
      {"run", "--config", cfg_path.string(), "--seed", "13", "--out", p2});
  REQUIRE(r2.code == 0);
  const auto l2 = lines_of(slurp(p2 + "_trace.csv"));
  CHECK(fields_of(l2[1])[4] ==
        std::to_string(lfo::RandomSource::derive_seed(13, 0, 0)));

  // Conflicting budgets inside the file are rejected, but a budget flag on
  // the command line displaces both file budgets.
  const fs::path both_path = tmp.path / "both.ini";
  {
    std::ofstream cfg(both_path);
    cfg << "function=f6\nbudget-evals=400\nbudget-ms=50\n";
  }
  CHECK(run_cli({"run", "--config", both_path.string()}).code == 1);
  const std::string p3 = (tmp.path / "flag-budget").string();
  CHECK(run_cli({"run", "--config", both_path.string(), "--budget-evals",
                 "300", "--out", p3})
            .code == 0);

  CHECK(run_cli({"run", "--config", (tmp.path / "absent.ini").string()}).code ==
        1);
  const fs::path junk_path = tmp.path / "junk.ini";
  {
    std::ofstream cfg(junk_path);
    cfg << "function=f6\nwibble=3\n";
  }
  CHECK(run_cli({"run", "--config", junk_path.string()}).code == 1);
}

TEST_CASE("cli suite writes one file pair per benchmark", "[cli]") {
  TempDir tmp;
  const std::string out_dir = (tmp.path / "suite").string();
  const CliResult r = run_cli({"suite", "--budget-evals", "1000", "--seed",
                               "1", "--parallelism", "2", "--out-dir",
                               out_dir});
  REQUIRE(r.code == 0);

  const std::uint32_t reps[] = {100, 100, 100, 20, 10};
  const char* names[] = {"f0", "f2", "f5", "f6", "bump"};
  for (std::size_t i = 0; i < 5; ++i) {
    const fs::path trace_path =
        fs::path(out_dir) / (std::string(names[i]) + "_trace.csv");
    const fs::path summary_path =
        fs::path(out_dir) / (std::string(names[i]) + "_summary.csv");
    REQUIRE(fs::exists(trace_path));
    REQUIRE(fs::exists(summary_path));

    // Aggregates over all six algorithms at the final checkpoint report
    // the preset's replication count.
    const auto summary_lines = lines_of(slurp(summary_path));
    int final_rows = 0;
    for (const auto& line : summary_lines) {
      const auto fields = fields_of(line);
      if (fields.size() == 8 && fields[2] == "1000") {
        ++final_rows;
        CHECK(fields[7] == std::to_string(reps[i]));
      }
    }
    CHECK(final_rows == 6);
  }
}
