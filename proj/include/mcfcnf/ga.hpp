#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <vector>

#include "mcfcnf/common.hpp"
#include "mcfcnf/evaluate.hpp"
#include "mcfcnf/flowcore.hpp"
#include "mcfcnf/instance.hpp"

namespace mcfcnf {

struct GAConfig {
  std::size_t population_size = 10;
  // Children per iteration are ceil(crossover_probability * population_size).
  double crossover_probability = 0.5;
  // Chance that a child is mutated.
  double mutation_probability = 0.5;
  // Wall-clock seconds for the run: evolution stops at 4/5, polish gets 1/5.
  double time_limit_s = 60.0;
  std::uint64_t seed = 1;
  double d_min = kDefaultDMin;
  // When non-zero, evolution runs exactly this many iterations and ignores
  // the clock. Polish still receives time_limit_s / 5.
  std::size_t max_iterations = 0;
  bool polish = true;
  // Concurrent fitness evaluations; 0 uses the hardware concurrency.
  unsigned threads = 1;
};

// Throws std::invalid_argument on out-of-range parameters.
void check_config(const GAConfig& config);

struct ScoredOrganism {
  Organism organism;
  ScoredSolution solution;
};

struct IterationRecord {
  std::size_t iteration = 0;
  double best_cost = 0.0;
  double mean_cost = 0.0;
  double elapsed_s = 0.0;
  // Cumulative number of min-cost-flow solves.
  std::size_t lp_solves = 0;

  friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

struct RunResult {
  ScoredSolution best;
  Organism best_organism;
  // Entry 0 describes the initial population.
  std::vector<IterationRecord> history;
  ScoredSolution polished;
  // Fitness of the slope-scaling seed organism.
  double seed_cost = 0.0;
};

// Called on the coordinating thread for every organism evaluated.
using EvaluationObserver = std::function<void(const Organism&, const ScoredSolution&)>;

// Organism 0 is the slope-scaling seed d_ek = c_k; the rest draw every entry
// uniformly from [d_min, mean fixed cost], with 1.0 as the upper end when the
// mean does not exceed d_min.
std::vector<Organism> init_population(const Instance& instance, const GAConfig& config, Rng& rng);

// True cost of the flow the organism's surrogate LP routes. Lower is fitter.
ScoredSolution fitness(const Instance& instance, const Organism& organism);

// Binary tournaments over `costs` until `target_size` entries remain; each
// tournament drops the costlier of two distinct random entries (ties keep the
// lower index). The cheapest entry is never dropped. Returns surviving
// indices in increasing order.
std::vector<std::size_t> tournament_survivors(std::span<const double> costs,
                                              std::size_t target_size, Rng& rng);

std::vector<ScoredOrganism> tournament_select(std::vector<ScoredOrganism> population,
                                              std::size_t target_size, Rng& rng);

// Index of the winner of one binary tournament.
std::size_t tournament_pick(std::span<const double> costs, Rng& rng);

// Child takes parent_a on [lo, hi) and parent_b elsewhere.
Organism crossover_interval(const Organism& parent_a, const Organism& parent_b, std::size_t lo,
                            std::size_t hi);

// crossover_interval with lo <= hi drawn from two uniform cut points in [0, len].
Organism crossover(const Organism& parent_a, const Organism& parent_b, Rng& rng);

// Moves one entry by `delta`, flooring at d_min. Unbounded entries restart
// from `unbounded_reset`.
double perturb(double value, double delta, double d_min, double unbounded_reset);

// Perturbs a uniform count in [1, max(1, len / 10)] of distinct entries by
// +/- U(0, 1).
Organism mutate(const Organism& organism, Rng& rng, const GAConfig& config,
                double unbounded_reset = 1.0);

// Full run: initialise, evolve until the iteration or time limit, then
// polish the best solution.
RunResult evolve(const Instance& instance, const GAConfig& config,
                 const EvaluationObserver& observer = {});

// d_ek = d_min where the optimal flow leaves the pair unused and unbounded
// where it is used; the surrogate LP then reproduces an optimal ILP flow.
Organism theorem_d(const Instance& instance, const FlowSolution& optimal_flow,
                   double d_min = kDefaultDMin);

// CSV: iteration,elapsed_s,best_cost,mean_cost,lp_solves
void write_convergence_csv(std::ostream& out, const std::vector<IterationRecord>& history);

// MCFCNF_THREADS, or 0 when unset or unparsable.
unsigned threads_from_env();

}  // namespace mcfcnf
