#include "mcfcnf/ga.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "detail/text.hpp"
#include "mcfcnf/exact.hpp"

namespace mcfcnf {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double init_upper_bound(const Instance& instance, double d_min) {
  const double mean = instance.mean_fixed_cost();
  return mean > d_min ? mean : 1.0;
}

std::size_t cheapest(std::span<const double> costs) {
  return static_cast<std::size_t>(std::min_element(costs.begin(), costs.end()) - costs.begin());
}

unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Evaluates organisms in parallel; results land at their input positions.
std::vector<ScoredSolution> evaluate_all(const Instance& instance,
                                         std::span<const Organism> organisms, unsigned threads) {
  std::vector<ScoredSolution> out(organisms.size());
  const unsigned workers =
      std::min<unsigned>(resolve_threads(threads), static_cast<unsigned>(organisms.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < organisms.size(); ++i) out[i] = fitness(instance, organisms[i]);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < organisms.size(); i = next++) {
            out[i] = fitness(instance, organisms[i]);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
  return out;
}

IterationRecord summarize(std::size_t iteration, const std::vector<ScoredOrganism>& population,
                          double elapsed, std::size_t lp_solves) {
  IterationRecord record;
  record.iteration = iteration;
  record.best_cost = population.front().solution.true_cost;
  double sum = 0.0;
  for (const ScoredOrganism& member : population) {
    record.best_cost = std::min(record.best_cost, member.solution.true_cost);
    sum += member.solution.true_cost;
  }
  record.mean_cost = sum / static_cast<double>(population.size());
  record.elapsed_s = elapsed;
  record.lp_solves = lp_solves;
  return record;
}

}  // namespace

void check_config(const GAConfig& config) {
  if (config.population_size < 2) throw std::invalid_argument("population size must be at least 2");
  const auto is_probability = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!is_probability(config.crossover_probability)) {
    throw std::invalid_argument("crossover probability must be in [0, 1]");
  }
  if (!is_probability(config.mutation_probability)) {
    throw std::invalid_argument("mutation probability must be in [0, 1]");
  }
  if (!(config.time_limit_s > 0.0)) throw std::invalid_argument("time limit must be positive");
  if (!(config.d_min > 0.0) || !std::isfinite(config.d_min)) {
    throw std::invalid_argument("d_min must be positive");
  }
}

std::vector<Organism> init_population(const Instance& instance, const GAConfig& config, Rng& rng) {
  check_config(config);
  const double upper = init_upper_bound(instance, config.d_min);
  std::vector<Organism> population;
  population.reserve(config.population_size);
  population.push_back(slope_scaling_organism(instance));
  for (std::size_t i = 1; i < config.population_size; ++i) {
    Organism organism{std::vector<double>(instance.pair_count())};
    for (double& d : organism.d) d = rng.uniform(config.d_min, upper);
    population.push_back(std::move(organism));
  }
  return population;
}

ScoredSolution fitness(const Instance& instance, const Organism& organism) {
  return score(instance, solve_min_cost_flow(build_expanded_network(instance, organism)));
}

std::vector<std::size_t> tournament_survivors(std::span<const double> costs,
                                              std::size_t target_size, Rng& rng) {
  if (target_size < 1 || target_size > costs.size()) {
    throw std::invalid_argument("tournament target size must be in [1, population size]");
  }
  const std::size_t elite = cheapest(costs);
  std::vector<std::size_t> pool(costs.size());
  std::iota(pool.begin(), pool.end(), 0);
  while (pool.size() > target_size) {
    const std::size_t i = rng.below(pool.size());
    std::size_t j = rng.below(pool.size() - 1);
    if (j >= i) ++j;
    const std::size_t a = pool[i];
    const std::size_t b = pool[j];
    const bool a_wins = costs[a] < costs[b] || (costs[a] == costs[b] && a < b);
    std::size_t loser_slot = a_wins ? j : i;
    if (pool[loser_slot] == elite) loser_slot = a_wins ? i : j;
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(loser_slot));
  }
  return pool;
}

std::vector<ScoredOrganism> tournament_select(std::vector<ScoredOrganism> population,
                                              std::size_t target_size, Rng& rng) {
  std::vector<double> costs;
  costs.reserve(population.size());
  for (const ScoredOrganism& member : population) costs.push_back(member.solution.true_cost);
  std::vector<ScoredOrganism> kept;
  kept.reserve(target_size);
  for (std::size_t index : tournament_survivors(costs, target_size, rng)) {
    kept.push_back(std::move(population[index]));
  }
  return kept;
}

std::size_t tournament_pick(std::span<const double> costs, Rng& rng) {
  if (costs.empty()) throw std::invalid_argument("tournament over an empty population");
  if (costs.size() == 1) return 0;
  const std::size_t i = rng.below(costs.size());
  std::size_t j = rng.below(costs.size() - 1);
  if (j >= i) ++j;
  const bool i_wins = costs[i] < costs[j] || (costs[i] == costs[j] && i < j);
  return i_wins ? i : j;
}

Organism crossover_interval(const Organism& parent_a, const Organism& parent_b, std::size_t lo,
                            std::size_t hi) {
  if (parent_a.d.size() != parent_b.d.size()) throw ShapeError("crossover parents differ in length");
  if (lo > hi || hi > parent_a.d.size()) throw std::invalid_argument("crossover interval out of range");
  Organism child = parent_b;
  std::copy(parent_a.d.begin() + static_cast<std::ptrdiff_t>(lo),
            parent_a.d.begin() + static_cast<std::ptrdiff_t>(hi),
            child.d.begin() + static_cast<std::ptrdiff_t>(lo));
  return child;
}

Organism crossover(const Organism& parent_a, const Organism& parent_b, Rng& rng) {
  if (parent_a.d.size() != parent_b.d.size()) throw ShapeError("crossover parents differ in length");
  const std::size_t len = parent_a.d.size();
  const std::size_t x = rng.below(len + 1);
  const std::size_t y = rng.below(len + 1);
  return crossover_interval(parent_a, parent_b, std::min(x, y), std::max(x, y));
}

double perturb(double value, double delta, double d_min, double unbounded_reset) {
  const double base = Organism::is_unbounded(value) ? unbounded_reset : value;
  return std::max(d_min, base + delta);
}

Organism mutate(const Organism& organism, Rng& rng, const GAConfig& config,
                double unbounded_reset) {
  Organism out = organism;
  const std::size_t len = out.d.size();
  if (len == 0) return out;
  const std::size_t count = 1 + rng.below(std::max<std::size_t>(1, len / 10));
  std::vector<std::size_t> slots(len);
  std::iota(slots.begin(), slots.end(), 0);
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(slots[i], slots[i + rng.below(len - i)]);
  }
  for (std::size_t i = 0; i < count; ++i) {
    const bool up = rng.coin();
    const double amount = rng.uniform01();
    double& d = out.d[slots[i]];
    d = perturb(d, up ? amount : -amount, config.d_min, unbounded_reset);
  }
  return out;
}

RunResult evolve(const Instance& instance, const GAConfig& config,
                 const EvaluationObserver& observer) {
  check_config(config);
  if (auto violations = structural_violations(instance); !violations.empty()) {
    throw ValidationError(violations.front());
  }
  if (const double reachable = max_flow_value(instance);
      reachable + 1e-9 * std::max(1.0, instance.target) < instance.target) {
    throw InfeasibleError(reachable, instance.target);
  }

  const auto start = Clock::now();
  Rng rng(config.seed);
  const double reset = init_upper_bound(instance, config.d_min);
  const std::size_t n = config.population_size;

  // Randomness is drawn in a fixed order: the initial population entry by
  // entry; then per iteration, for each child two parent tournaments, the
  // crossover cut points, the mutation draw and any mutation; then the
  // survivor tournaments.
  std::vector<Organism> initial = init_population(instance, config, rng);
  std::vector<ScoredSolution> scored = evaluate_all(instance, initial, config.threads);
  std::vector<ScoredOrganism> population;
  for (std::size_t i = 0; i < n; ++i) {
    if (observer) observer(initial[i], scored[i]);
    population.push_back({std::move(initial[i]), std::move(scored[i])});
  }
  std::size_t lp_solves = n;

  RunResult result;
  result.seed_cost = population.front().solution.true_cost;
  result.history.push_back(summarize(0, population, seconds_since(start), lp_solves));

  const std::size_t children_per_iteration =
      static_cast<std::size_t>(std::ceil(config.crossover_probability * static_cast<double>(n)));
  const double evolution_budget = 0.8 * config.time_limit_s;
  std::vector<double> costs;
  for (std::size_t iteration = 1;; ++iteration) {
    if (config.max_iterations > 0 ? iteration > config.max_iterations
                                  : seconds_since(start) >= evolution_budget) {
      break;
    }
    costs.clear();
    for (const ScoredOrganism& member : population) costs.push_back(member.solution.true_cost);

    std::vector<Organism> children;
    for (std::size_t c = 0; c < children_per_iteration; ++c) {
      const std::size_t a = tournament_pick(costs, rng);
      const std::size_t b = tournament_pick(costs, rng);
      Organism child = crossover(population[a].organism, population[b].organism, rng);
      if (rng.uniform01() < config.mutation_probability) {
        child = mutate(child, rng, config, reset);
      }
      children.push_back(std::move(child));
    }
    std::vector<ScoredSolution> child_scores = evaluate_all(instance, children, config.threads);
    lp_solves += children.size();
    for (std::size_t c = 0; c < children.size(); ++c) {
      if (observer) observer(children[c], child_scores[c]);
      population.push_back({std::move(children[c]), std::move(child_scores[c])});
    }
    population = tournament_select(std::move(population), n, rng);
    result.history.push_back(summarize(iteration, population, seconds_since(start), lp_solves));
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < population.size(); ++i) {
    if (population[i].solution.true_cost < population[best].solution.true_cost) best = i;
  }
  result.best = population[best].solution;
  result.best_organism = population[best].organism;
  result.polished =
      config.polish ? polish(instance, result.best, config.time_limit_s / 5.0) : result.best;
  return result;
}

Organism theorem_d(const Instance& instance, const FlowSolution& optimal_flow, double d_min) {
  if (optimal_flow.g.size() != instance.pair_count()) {
    throw ShapeError("optimal flow shape does not match instance");
  }
  Organism organism{std::vector<double>(optimal_flow.g.size())};
  for (std::size_t p = 0; p < organism.d.size(); ++p) {
    organism.d[p] = optimal_flow.g[p] > kFlowTolerance ? Organism::kUnbounded : d_min;
  }
  return organism;
}

void write_convergence_csv(std::ostream& out, const std::vector<IterationRecord>& history) {
  out << "iteration,elapsed_s,best_cost,mean_cost,lp_solves\n";
  for (const IterationRecord& r : history) {
    out << r.iteration << ',' << detail::format_number(r.elapsed_s) << ','
        << detail::format_number(r.best_cost) << ',' << detail::format_number(r.mean_cost) << ','
        << r.lp_solves << '\n';
  }
}

unsigned threads_from_env() {
  const char* value = std::getenv("MCFCNF_THREADS");
  if (value == nullptr) return 0;
  auto parsed = detail::parse_int(value);
  if (!parsed || *parsed < 0) return 0;
  return static_cast<unsigned>(*parsed);
}

}  // namespace mcfcnf
