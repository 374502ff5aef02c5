#include "mcfcnf/cli.hpp"

#include <glob.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "CLI11.hpp"
#include "detail/text.hpp"
#include "mcfcnf/evaluate.hpp"
#include "mcfcnf/exact.hpp"
#include "mcfcnf/ga.hpp"
#include "mcfcnf/instance.hpp"

namespace mcfcnf::cli {
namespace {

using Clock = std::chrono::steady_clock;
using detail::format_number;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  writer(out);
  if (!out) throw IoError("write failed: " + path.string());
}

// Loads an instance and reports routing infeasibility separately from
// malformed input.
struct Loaded {
  Instance instance;
  std::vector<std::string> violations;
};

Loaded load_checked(const std::string& path) {
  Loaded loaded{load_instance(path), {}};
  loaded.violations = validate(loaded.instance);
  return loaded;
}

int report_infeasible(const std::vector<std::string>& violations, std::ostream& err) {
  for (const std::string& v : violations) err << "error: " << v << '\n';
  return kExitInfeasible;
}

struct SolveFlags {
  std::string instance;
  double time_limit = 60.0;
  std::size_t iterations = 0;
  unsigned long long seed = 1;
  std::size_t population = 10;
  double crossover = 0.5;
  double mutation = 0.5;
  double d_min = kDefaultDMin;
  bool no_polish = false;
  std::string solution = "solution.csv";
  std::string convergence = "convergence.csv";
};

int cmd_solve(const SolveFlags& flags, std::ostream& out, std::ostream& err) {
  const Loaded loaded = load_checked(flags.instance);
  if (!loaded.violations.empty()) return report_infeasible(loaded.violations, err);
  GAConfig config;
  config.population_size = flags.population;
  config.crossover_probability = flags.crossover;
  config.mutation_probability = flags.mutation;
  config.time_limit_s = flags.time_limit;
  config.seed = flags.seed;
  config.d_min = flags.d_min;
  config.max_iterations = flags.iterations;
  config.polish = !flags.no_polish;
  config.threads = threads_from_env();

  const auto start = Clock::now();
  const RunResult run = evolve(loaded.instance, config);
  const double elapsed = seconds_since(start);
  const double bound = lp_relaxation_bound(loaded.instance);
  write_file(flags.solution,
             [&](std::ostream& f) { write_solution_csv(f, loaded.instance, run.polished); });
  write_file(flags.convergence, [&](std::ostream& f) { write_convergence_csv(f, run.history); });
  out << "best_cost=" << format_number(run.best.true_cost)
      << " polished_cost=" << format_number(run.polished.true_cost)
      << " bound=" << format_number(bound) << " iterations=" << run.history.size() - 1
      << " elapsed_s=" << format_number(elapsed) << '\n';
  return kExitOk;
}

struct ExactFlags {
  std::string instance;
  double budget = 60.0;
  double gap = kDefaultGap;
  std::string solution = "solution.csv";
};

int cmd_exact(const ExactFlags& flags, std::ostream& out, std::ostream& err) {
  const Loaded loaded = load_checked(flags.instance);
  if (!loaded.violations.empty()) return report_infeasible(loaded.violations, err);
  const ExactResult result = solve_exact(loaded.instance, flags.budget, flags.gap);
  write_file(flags.solution,
             [&](std::ostream& f) { write_solution_csv(f, loaded.instance, result.best); });
  out << "cost=" << format_number(result.best.true_cost)
      << " proven=" << (result.proven_optimal ? "true" : "false")
      << " bound=" << format_number(result.bound) << " nodes=" << result.nodes_explored << '\n';
  return kExitOk;
}

struct GenFlags {
  std::string kind = "grid";
  int vertices = 0;
  int capacities = 1;
  unsigned long long seed = 1;
  double target_fraction = 0.5;
  CostParams costs;
  std::string output;
};

int cmd_gen(const GenFlags& flags, std::ostream& out, std::ostream& err) {
  Instance instance;
  try {
    instance = generate_random(parse_generator_kind(flags.kind), flags.vertices, flags.capacities,
                               flags.costs, flags.target_fraction, flags.seed);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  save_instance(flags.output, instance);
  const auto violations = validate(instance);
  if (violations.empty()) {
    out << "OK\n";
  } else {
    for (const std::string& v : violations) out << v << '\n';
  }
  return kExitOk;
}

int cmd_validate(const std::string& path, std::ostream& out, std::ostream& err) {
  const Loaded loaded = load_checked(path);
  if (!loaded.violations.empty()) return report_infeasible(loaded.violations, err);
  out << "OK\n";
  return kExitOk;
}

std::vector<std::filesystem::path> expand_glob(const std::string& pattern) {
  glob_t matches{};
  std::vector<std::filesystem::path> paths;
  if (::glob(pattern.c_str(), 0, nullptr, &matches) == 0) {
    for (std::size_t i = 0; i < matches.gl_pathc; ++i) paths.emplace_back(matches.gl_pathv[i]);
  }
  ::globfree(&matches);
  std::sort(paths.begin(), paths.end());
  return paths;
}

struct CompareFlags {
  std::string pattern;
  double budget = 60.0;
  int repeats = 3;
  unsigned long long seed = 1;
  std::size_t iterations = 0;
  std::string output = "compare.csv";
};

int cmd_compare(const CompareFlags& flags, std::ostream& out, std::ostream& err) {
  CompareOptions options;
  options.instances = expand_glob(flags.pattern);
  if (options.instances.empty()) {
    err << "error: no instances matched '" << flags.pattern << "'\n";
    return kExitUsage;
  }
  options.budget_s = flags.budget;
  options.repeats = flags.repeats;
  options.seed = flags.seed;
  options.iterations = flags.iterations;
  const std::vector<CompareRow> rows = run_compare(options, err);
  write_file(flags.output, [&](std::ostream& f) { write_compare_csv(f, rows); });
  bool consistent = true;
  for (const CompareRow& row : rows) {
    out << row.instance << ": ga=" << format_number(row.ga_cost)
        << " exact=" << format_number(row.exact_cost)
        << " bound=" << format_number(row.lower_bound) << " ratio=" << format_number(row.ratio)
        << '\n';
    if (!compare_consistent(row)) {
      err << "error: " << row.instance << ": GA cost below lower bound\n";
      consistent = false;
    }
  }
  if (rows.size() < options.instances.size()) return kExitInfeasible;
  return consistent ? kExitOk : kExitInconsistent;
}

}  // namespace

bool compare_consistent(const CompareRow& row) {
  const double slack = 1e-6 * std::max(1.0, std::abs(row.lower_bound));
  return row.ga_cost >= row.lower_bound - slack && row.ga_min_cost >= row.lower_bound - slack;
}

std::vector<CompareRow> run_compare(const CompareOptions& options, std::ostream& log) {
  std::vector<CompareRow> rows;
  for (const std::filesystem::path& path : options.instances) {
    const Loaded loaded = load_checked(path.string());
    if (!loaded.violations.empty()) {
      log << "skipping " << path.string() << ": " << loaded.violations.front() << '\n';
      continue;
    }
    CompareRow row;
    row.instance = path.filename().string();
    row.pairs = loaded.instance.pair_count();

    GAConfig config;
    config.time_limit_s = options.budget_s;
    config.max_iterations = options.iterations;
    config.threads = threads_from_env();
    double ga_total = 0.0;
    double ga_time = 0.0;
    row.ga_min_cost = std::numeric_limits<double>::infinity();
    for (int r = 0; r < options.repeats; ++r) {
      config.seed = options.seed + static_cast<unsigned long long>(r);
      const auto start = Clock::now();
      const RunResult run = evolve(loaded.instance, config);
      ga_time += seconds_since(start);
      ga_total += run.polished.true_cost;
      row.ga_min_cost = std::min(row.ga_min_cost, run.polished.true_cost);
    }
    row.ga_cost = ga_total / options.repeats;
    row.ga_wall_s = ga_time / options.repeats;

    const auto start = Clock::now();
    const ExactResult exact = solve_exact(loaded.instance, options.budget_s);
    row.exact_wall_s = seconds_since(start);
    row.exact_cost = exact.best.true_cost;
    row.exact_proven = exact.proven_optimal;
    row.lower_bound = std::max(exact.bound, lp_relaxation_bound(loaded.instance));
    row.ratio = row.exact_cost > 0.0 ? row.ga_cost / row.exact_cost : 1.0;
    rows.push_back(row);
  }
  return rows;
}

void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows) {
  out << "instance,pairs,ga_cost,ga_min_cost,exact_cost,exact_proven,lower_bound,ga_exact_ratio,"
         "ga_wall_s,exact_wall_s\n";
  for (const CompareRow& row : rows) {
    out << row.instance << ',' << row.pairs << ',' << format_number(row.ga_cost) << ','
        << format_number(row.ga_min_cost) << ',' << format_number(row.exact_cost) << ','
        << (row.exact_proven ? "true" : "false") << ',' << format_number(row.lower_bound) << ','
        << format_number(row.ratio) << ',' << format_number(row.ga_wall_s) << ','
        << format_number(row.exact_wall_s) << '\n';
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-capacity fixed-charge network flow solver"};
  app.require_subcommand(1);

  SolveFlags solve;
  CLI::App* solve_cmd = app.add_subcommand("solve", "Run the genetic algorithm");
  solve_cmd->add_option("--instance", solve.instance, "Instance file")->required();
  solve_cmd->add_option("--time-limit", solve.time_limit, "Wall-clock seconds for the whole run");
  solve_cmd->add_option("--iterations", solve.iterations,
                        "Stop evolution after N iterations instead of on the clock");
  solve_cmd->add_option("--seed", solve.seed, "Random seed");
  solve_cmd->add_option("--population", solve.population, "Population size");
  solve_cmd->add_option("--crossover", solve.crossover, "Crossover probability");
  solve_cmd->add_option("--mutation", solve.mutation, "Mutation probability");
  solve_cmd->add_option("--d-min", solve.d_min, "Lower bound on scaling parameters");
  solve_cmd->add_flag("--no-polish", solve.no_polish, "Skip the polish stage");
  solve_cmd->add_option("--solution", solve.solution, "Solution CSV path");
  solve_cmd->add_option("--convergence", solve.convergence, "Convergence CSV path");

  ExactFlags exact;
  CLI::App* exact_cmd = app.add_subcommand("exact", "Run branch-and-bound");
  exact_cmd->add_option("--instance", exact.instance, "Instance file")->required();
  exact_cmd->add_option("--budget", exact.budget, "Wall-clock seconds");
  exact_cmd->add_option("--gap", exact.gap, "Relative optimality gap");
  exact_cmd->add_option("--solution", exact.solution, "Solution CSV path");

  GenFlags gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Generate a random instance");
  gen_cmd->add_option("--kind", gen.kind, "grid or geometric");
  gen_cmd->add_option("--vertices", gen.vertices, "Vertex count")->required();
  gen_cmd->add_option("--capacities", gen.capacities, "Capacity classes");
  gen_cmd->add_option("--seed", gen.seed, "Random seed");
  gen_cmd->add_option("--target-fraction", gen.target_fraction, "Target as a fraction of max flow");
  gen_cmd->add_option("--fixed-min", gen.costs.fixed_min, "Smallest base fixed cost");
  gen_cmd->add_option("--fixed-max", gen.costs.fixed_max, "Largest base fixed cost");
  gen_cmd->add_option("--variable-min", gen.costs.variable_min, "Smallest base variable cost");
  gen_cmd->add_option("--variable-max", gen.costs.variable_max, "Largest base variable cost");
  gen_cmd->add_option("--base-capacity", gen.costs.base_capacity, "Smallest capacity");
  gen_cmd->add_option("--capacity-growth", gen.costs.capacity_growth, "Ratio between classes");
  gen_cmd->add_option("-o,--output", gen.output, "Output instance path")->required();

  std::string validate_path;
  CLI::App* validate_cmd = app.add_subcommand("validate", "Check an instance");
  validate_cmd->add_option("--instance", validate_path, "Instance file")->required();

  CompareFlags compare;
  CLI::App* compare_cmd = app.add_subcommand("compare", "GA versus branch-and-bound");
  compare_cmd->add_option("--instances", compare.pattern, "Glob of instance files")->required();
  compare_cmd->add_option("--budget", compare.budget, "Seconds per solver run");
  compare_cmd->add_option("--repeats", compare.repeats, "GA runs averaged per instance");
  compare_cmd->add_option("--seed", compare.seed, "Seed of the first GA run");
  compare_cmd->add_option("--iterations", compare.iterations, "GA iteration stop");
  compare_cmd->add_option("-o,--output", compare.output, "Report CSV path");

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*solve_cmd) return cmd_solve(solve, out, err);
    if (*exact_cmd) return cmd_exact(exact, out, err);
    if (*gen_cmd) return cmd_gen(gen, out, err);
    if (*validate_cmd) return cmd_validate(validate_path, out, err);
    if (*compare_cmd) return cmd_compare(compare, out, err);
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace mcfcnf::cli
