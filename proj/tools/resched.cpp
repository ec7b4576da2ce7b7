// Command-line front end: instance generation, solving, robustness
// verification, and benchmark aggregation.
//
// Exit codes: 0 success (verify: robust), 1 verify: violated, 2 invalid
// flags or input validation, 3 solve: infeasible, 4 solve: timed out with
// no incumbent, 5 solve: lbbd requested with no MILP adapter configured.

#include <atomic>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "resched/resched.hpp"

namespace {

using namespace resched;

constexpr int kExitOk = 0;
constexpr int kExitViolated = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitTimeout = 4;
constexpr int kExitNoAdapter = 5;

volatile std::sig_atomic_t g_interrupted = 0;

void handle_interrupt(int) { g_interrupted = 1; }

std::string format_double(double value) {
  std::ostringstream out;
  out << std::setprecision(15) << value;
  return out.str();
}

// ---------------------------------------------------------------------------
// generate

struct GenerateArgs {
  GenConfig cfg;
  std::string preset;
  std::string out_dir = ".";
  std::string output;  // single-instance file name override
};

std::string instance_file_name(const GenConfig& cfg, int index) {
  std::ostringstream name;
  name << "instance-" << std::setw(3) << std::setfill('0') << index << "-n" << cfg.n << "-a1_"
       << cfg.alpha1 << "-a2_" << cfg.alpha2 << "-a3_" << cfg.alpha3 << "-d" << cfg.max_deviation
       << "-seed" << cfg.seed << ".json";
  return name.str();
}

int run_generate(const GenerateArgs& args) {
  namespace fs = std::filesystem;
  fs::create_directories(args.out_dir);

  std::vector<GeneratedInstance> generated;
  if (args.preset.empty()) {
    generated.push_back(generate_instance(args.cfg));
  } else if (args.preset == "paper-grid") {
    generated = generate_paper_grid(args.cfg.n, args.cfg.seed, args.cfg.interval_length,
                                    args.cfg.intervals_per_op, args.cfg.energy_limit);
  } else {
    std::cerr << "unknown --preset '" << args.preset << "' (available: paper-grid)\n";
    return kExitUsage;
  }

  io::Manifest manifest;
  for (std::size_t index = 0; index < generated.size(); ++index) {
    const GeneratedInstance& item = generated[index];
    std::string name = args.output.empty() || generated.size() > 1
                           ? instance_file_name(item.config, static_cast<int>(index))
                           : args.output;
    const std::string path = (fs::path(args.out_dir) / name).string();
    io::save_json_file(path, io::instance_to_json(item.instance));
    manifest.instances.push_back(io::manifest_entry_for(item, path));
  }

  const auto manifest_json = io::manifest_to_json(manifest);
  io::save_json_file((fs::path(args.out_dir) / "manifest.json").string(), manifest_json);
  std::cout << io::serialize(manifest_json);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// solve

struct SolveArgs {
  std::string instance_path;
  std::string algorithm = "tabu";
  std::string output;
  double time_limit_s = 0;  // 0: none
  std::uint64_t seed = 0;
  TabuParams tabu;
  bool warm_start = true;
};

std::unique_ptr<milp::SolverAdapter> make_adapter(std::string* name_out) {
  const char* env = std::getenv("RESCHED_MILP_ADAPTER");
  const std::string name = env == nullptr ? "dfs" : env;
  if (name_out) *name_out = name;
  if (name == "dfs") return std::make_unique<milp::DfsMilpSolver>();
  return nullptr;
}

std::optional<std::chrono::milliseconds> time_limit_of(const SolveArgs& args) {
  if (args.time_limit_s <= 0) return std::nullopt;
  return std::chrono::milliseconds(static_cast<std::int64_t>(args.time_limit_s * 1000.0));
}

SolveResult dispatch_solve(const Instance& inst, const SolveArgs& args, int* error_exit) {
  *error_exit = kExitOk;
  if (args.algorithm == "edf") return edf_schedule(inst);

  if (args.algorithm == "greedy") {
    const auto started = std::chrono::steady_clock::now();
    SolveResult result;
    if (std::optional<Permutation> perm = greedy_initial(inst)) {
      FixedPermResult fixed = optimal_robust_schedule(inst, *perm);
      result.status = SolveStatus::kFeasible;
      result.objective = total_tardiness(inst, *fixed.schedule);
      result.schedule = std::move(fixed.schedule);
    }
    result.runtime_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - started)
                            .count();
    return result;
  }

  if (args.algorithm == "tabu") {
    TabuParams params = args.tabu;
    params.seed = args.seed;
    return tabu_search(inst, params);
  }

  if (args.algorithm == "bb" || args.algorithm == "lbbd") {
    std::optional<SolveResult> upper_bound;
    if (args.warm_start) {
      TabuParams params = args.tabu;
      params.seed = args.seed;
      SolveResult tabu = tabu_search(inst, params);
      if (tabu.status == SolveStatus::kFeasible) upper_bound = std::move(tabu);
    }
    if (args.algorithm == "bb") {
      BbLimits limits;
      limits.time_limit = time_limit_of(args);
      SolveResult result = bb_solve(inst, upper_bound, limits);
      if (upper_bound) {
        result.counters["tabu_ub"] = upper_bound->objective;
      }
      return result;
    }
    std::string adapter_name;
    std::unique_ptr<milp::SolverAdapter> adapter = make_adapter(&adapter_name);
    if (!adapter) {
      std::cerr << "no MILP adapter configured: RESCHED_MILP_ADAPTER='" << adapter_name
                << "' (available: dfs)\n";
      *error_exit = kExitNoAdapter;
      return {};
    }
    LbbdOptions options;
    options.time_limit = time_limit_of(args);
    options.initial_ub = upper_bound;
    return lbbd_solve(inst, *adapter, options);
  }

  std::cerr << "unknown --algorithm '" << args.algorithm
            << "' (available: edf greedy tabu bb lbbd)\n";
  *error_exit = kExitUsage;
  return {};
}

int run_solve(const SolveArgs& args) {
  Instance inst = io::load_instance(args.instance_path);
  int error_exit = kExitOk;
  SolveResult result = dispatch_solve(inst, args, &error_exit);
  if (error_exit != kExitOk) return error_exit;

  if (result.schedule) {
    // Every emitted schedule re-verifies as robust before it is written.
    if (!is_robust(inst, *result.schedule).robust) {
      std::cerr << "internal error: solver returned a non-robust schedule\n";
      return 70;
    }
  }

  const auto data = io::result_to_json(args.algorithm, result);
  if (args.output.empty()) {
    std::cout << io::serialize(data);
  } else {
    io::save_json_file(args.output, data);
  }

  if (result.status == SolveStatus::kInfeasible) return kExitInfeasible;
  if (result.status == SolveStatus::kTimedOut && !result.schedule) return kExitTimeout;
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  std::string instance_path;
  std::string schedule_path;
  bool brute_force = false;
};

int run_verify(const VerifyArgs& args) {
  Instance inst = io::load_instance(args.instance_path);
  std::vector<int> starts = io::starts_from_json(io::load_json_file(args.schedule_path));
  if (auto problem = validate_baseline(inst, starts)) {
    std::cerr << "invalid schedule: " << *problem << "\n";
    return kExitUsage;
  }
  BaselineSchedule base = make_baseline(inst, std::move(starts));

  if (args.brute_force) {
    BruteForceVerdict verdict = brute_force_is_robust(inst, base);
    if (verdict.robust) {
      std::cout << "Robust\n";
      return kExitOk;
    }
    std::cout << "Violated: interval " << verdict.witness->interval + 1 << " under scenario [";
    for (std::size_t i = 0; i < verdict.witness->scenario.deviation.size(); ++i) {
      std::cout << (i ? "," : "") << verdict.witness->scenario.deviation[i];
    }
    std::cout << "]\n";
    return kExitViolated;
  }

  RobustnessVerdict verdict = is_robust(inst, base);
  if (verdict.robust) {
    std::cout << "Robust\n";
    return kExitOk;
  }
  std::cout << "Violated: operation at position " << verdict.witness->position + 1
            << " realised at " << verdict.witness->shift_time << " overloads interval "
            << verdict.witness->interval + 1 << "\n";
  return kExitViolated;
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
  std::string manifest_path;
  std::vector<std::string> algorithms{"edf", "greedy", "tabu"};
  std::string output;
  double time_limit_s = 0;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::optional<int> stop_no_improve;
};

struct BenchRecord {
  double alpha3 = 0;
  int dmax = 0;
  std::string algorithm;
  bool has_objective = false;
  double objective = 0;
  double time_s = 0;
  bool proven_optimal = false;
  bool done = false;
};

struct Aggregate {
  std::vector<double> objectives;
  std::vector<double> times;
  int proven = 0;
  int count = 0;
};

std::pair<double, double> mean_std(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0};
  double sum = 0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return {mean, 0.0};
  double acc = 0;
  for (double v : values) acc += (v - mean) * (v - mean);
  return {mean, std::sqrt(acc / static_cast<double>(values.size() - 1))};
}

int run_bench(const BenchArgs& args) {
  io::Manifest manifest = io::manifest_from_json(io::load_json_file(args.manifest_path));

  std::vector<std::pair<std::size_t, std::string>> tasks;  // (instance index, algorithm)
  for (std::size_t i = 0; i < manifest.instances.size(); ++i) {
    for (const std::string& algorithm : args.algorithms) tasks.emplace_back(i, algorithm);
  }
  std::vector<BenchRecord> records(tasks.size());

  std::signal(SIGINT, handle_interrupt);
  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    while (g_interrupted == 0) {
      const std::size_t task = next.fetch_add(1);
      if (task >= tasks.size()) break;
      const auto& [index, algorithm] = tasks[task];
      const io::ManifestEntry& entry = manifest.instances[index];
      BenchRecord& record = records[task];
      record.alpha3 = entry.alpha3;
      record.dmax = entry.max_deviation;
      record.algorithm = algorithm;
      try {
        Instance inst = io::load_instance(entry.path);
        SolveArgs solve_args;
        solve_args.algorithm = algorithm;
        solve_args.time_limit_s = args.time_limit_s;
        solve_args.seed = args.seed + index;
        if (args.stop_no_improve) solve_args.tabu.stop_no_improve = args.stop_no_improve;
        int error_exit = kExitOk;
        SolveResult result = dispatch_solve(inst, solve_args, &error_exit);
        if (error_exit != kExitOk) continue;
        record.time_s = result.runtime_ms / 1000.0;
        record.proven_optimal = result.proven_optimal;
        if (result.schedule) {
          record.has_objective = true;
          record.objective = static_cast<double>(result.objective);
        }
        record.done = true;
      } catch (const std::exception& error) {
        std::cerr << entry.path << " (" << algorithm << "): " << error.what() << "\n";
      }
    }
  };

  std::vector<std::thread> pool;
  const int jobs = std::max(1, args.jobs);
  pool.reserve(static_cast<std::size_t>(jobs));
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (std::thread& thread : pool) thread.join();

  // Aggregate completed records per (alpha3, dmax, algorithm); groups are
  // ordered, algorithms keep their requested order.
  std::map<std::pair<double, int>, std::map<std::string, Aggregate>> groups;
  for (const BenchRecord& record : records) {
    if (!record.done) continue;
    Aggregate& agg = groups[{record.alpha3, record.dmax}][record.algorithm];
    ++agg.count;
    if (record.has_objective) agg.objectives.push_back(record.objective);
    agg.times.push_back(record.time_s);
    if (record.proven_optimal) ++agg.proven;
  }

  std::ostringstream csv;
  csv << "group_alpha3,group_dmax,algorithm,obj_mean,obj_std,time_mean_s,time_std_s,"
         "proven_opt_pct,count\n";
  for (const auto& [key, by_algorithm] : groups) {
    for (const std::string& algorithm : args.algorithms) {
      const auto found = by_algorithm.find(algorithm);
      if (found == by_algorithm.end()) continue;
      const Aggregate& agg = found->second;
      const auto [obj_mean, obj_std] = mean_std(agg.objectives);
      const auto [time_mean, time_std] = mean_std(agg.times);
      csv << key.first << "," << key.second << "," << algorithm << "," << format_double(obj_mean)
          << "," << format_double(obj_std) << "," << format_double(time_mean) << ","
          << format_double(time_std) << ","
          << format_double(agg.count ? 100.0 * agg.proven / agg.count : 0.0) << "," << agg.count
          << "\n";
    }
  }

  if (args.output.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(args.output);
    out << csv.str();
  }
  return g_interrupted ? 130 : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust single-machine scheduling under energy consumption limits"};
  app.require_subcommand(1);

  GenerateArgs generate_args;
  CLI::App* generate = app.add_subcommand("generate", "Generate random instances");
  generate->add_option("--n", generate_args.cfg.n, "Number of operations")->check(CLI::PositiveNumber);
  generate->add_option("--alpha1", generate_args.cfg.alpha1, "Interarrival mean factor")
      ->check(CLI::NonNegativeNumber);
  generate->add_option("--alpha2", generate_args.cfg.alpha2, "Due-date slack factor")
      ->check(CLI::NonNegativeNumber);
  generate->add_option("--alpha3", generate_args.cfg.alpha3, "Power lower-bound factor")
      ->check(CLI::Range(1e-9, 1.0));
  generate->add_option("--dmax", generate_args.cfg.max_deviation, "Maximum start-time deviation")
      ->check(CLI::NonNegativeNumber);
  generate->add_option("--seed", generate_args.cfg.seed, "Generator seed");
  generate->add_option("--interval-length", generate_args.cfg.interval_length,
                       "Metering interval length")
      ->check(CLI::PositiveNumber);
  generate->add_option("--intervals-per-op", generate_args.cfg.intervals_per_op,
                       "Metering intervals per operation")
      ->check(CLI::PositiveNumber);
  generate->add_option("--energy-limit", generate_args.cfg.energy_limit,
                       "Energy limit per metering interval")
      ->check(CLI::NonNegativeNumber);
  generate->add_option("--preset", generate_args.preset, "Named batch preset (paper-grid)");
  generate->add_option("--out-dir", generate_args.out_dir, "Output directory");
  generate->add_option("--output", generate_args.output, "File name for a single instance");

  SolveArgs solve_args;
  CLI::App* solve = app.add_subcommand("solve", "Solve an instance");
  solve->add_option("instance", solve_args.instance_path, "Instance JSON path")
      ->required()
      ->check(CLI::ExistingFile);
  solve->add_option("--algorithm", solve_args.algorithm, "edf | greedy | tabu | bb | lbbd");
  solve->add_option("--time-limit", solve_args.time_limit_s, "Time limit in seconds");
  solve->add_option("--seed", solve_args.seed, "Heuristic seed");
  solve->add_option("--output", solve_args.output, "Result JSON path (default: stdout)");
  solve->add_option("--tabu-restarts", solve_args.tabu.restarts)->check(CLI::PositiveNumber);
  solve->add_option("--tabu-iterations", solve_args.tabu.iterations)->check(CLI::PositiveNumber);
  solve->add_option("--tabu-neighbourhood", solve_args.tabu.neighbourhood)
      ->check(CLI::PositiveNumber);
  solve->add_option("--tabu-len", solve_args.tabu.tabu_len)->check(CLI::PositiveNumber);
  int stop_no_improve = 0;
  solve->add_option("--stop-no-improve", stop_no_improve,
                    "Stop a tabu run after this many non-improving iterations");
  solve->add_flag("!--no-warm-start", solve_args.warm_start,
                  "Skip the tabu warm start for bb/lbbd");

  VerifyArgs verify_args;
  CLI::App* verify = app.add_subcommand("verify", "Check a schedule for robustness");
  verify->add_option("instance", verify_args.instance_path)->required()->check(CLI::ExistingFile);
  verify->add_option("schedule", verify_args.schedule_path)->required()->check(CLI::ExistingFile);
  verify->add_flag("--brute-force", verify_args.brute_force, "Exhaustive scenario enumeration");

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "Run algorithms over a manifest, emit CSV");
  bench->add_option("manifest", bench_args.manifest_path)->required()->check(CLI::ExistingFile);
  bench->add_option("--algorithms", bench_args.algorithms, "Algorithms to run")->delimiter(',');
  bench->add_option("--time-limit", bench_args.time_limit_s, "Per-solve time limit in seconds");
  bench->add_option("--seed", bench_args.seed, "Base seed; instances offset it");
  bench->add_option("--jobs", bench_args.jobs, "Parallel workers")->check(CLI::PositiveNumber);
  int bench_stop_no_improve = 0;
  bench->add_option("--stop-no-improve", bench_stop_no_improve,
                    "Tabu stop rule for benchmark runs");
  bench->add_option("--output", bench_args.output, "CSV path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    if (error.get_exit_code() == 0) return app.exit(error);  // --help
    app.exit(error);
    return kExitUsage;
  }

  try {
    if (*generate) return run_generate(generate_args);
    if (*solve) {
      if (stop_no_improve > 0) solve_args.tabu.stop_no_improve = stop_no_improve;
      return run_solve(solve_args);
    }
    if (*verify) return run_verify(verify_args);
    if (*bench) {
      if (bench_stop_no_improve > 0) bench_args.stop_no_improve = bench_stop_no_improve;
      return run_bench(bench_args);
    }
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
