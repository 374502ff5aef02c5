#include "mcfcnf/exact.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <tuple>

#include "detail/flow.hpp"
#include "mcfcnf/simd/kernels.hpp"

namespace mcfcnf {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool within_gap(double best, double bound, double gap) {
  return best - bound <= gap * std::abs(best);
}

// Open-list entry: lowest bound first, then deeper, then older.
struct Pending {
  double lower_bound;
  int depth;
  std::size_t node;

  bool operator>(const Pending& other) const {
    return std::tie(lower_bound, other.depth, node) >
           std::tie(other.lower_bound, depth, other.node);
  }
};

class BranchAndBound {
 public:
  BranchAndBound(const Instance& instance, const ExactOptions& options)
      : instance_(instance),
        options_(options),
        pairs_(instance.pair_count()),
        relaxed_cost_(pairs_),
        state_(pairs_),
        unit_cost_(pairs_),
        allowed_(pairs_) {
    simd::scaled_unit_costs(instance.fixed_cost, instance.variable_cost,
                            instance.expanded_capacities(), relaxed_cost_);
    if (options.incumbent) {
      if (options.incumbent->flow.g.size() != pairs_) throw ShapeError("incumbent shape mismatch");
      best_ = *options.incumbent;
    }
  }

  ExactResult run() {
    const auto start = Clock::now();
    nodes_.push_back(BnBNode{0, 0, PairState::kFree, 0, -std::numeric_limits<double>::infinity()});
    open_.push(Pending{nodes_[0].lower_bound, 0, 0});

    std::size_t explored = 0;
    double interrupted_bound = std::numeric_limits<double>::infinity();
    while (!open_.empty()) {
      const Pending next = open_.top();
      if (explored > 0 && seconds_since(start) >= options_.budget_s) {
        interrupted_bound = next.lower_bound;
        break;
      }
      open_.pop();
      if (best_ && next.lower_bound >= cutoff()) {
        // Everything still open is at least as expensive.
        while (!open_.empty()) open_.pop();
        break;
      }
      ++explored;
      expand(next.node, explored == 1);
    }

    if (!best_) throw InfeasibleError(0.0, instance_.target);
    ExactResult result;
    result.best = std::move(*best_);
    result.nodes_explored = explored;
    result.bound = std::min(result.best.true_cost, interrupted_bound);
    result.proven_optimal = within_gap(result.best.true_cost, result.bound, options_.gap);
    return result;
  }

 private:
  double cutoff() const {
    return best_->true_cost - options_.gap * std::abs(best_->true_cost);
  }

  void load_state(std::size_t id) {
    if (options_.closed.empty()) {
      std::fill(state_.begin(), state_.end(), PairState::kFree);
    } else {
      for (std::size_t p = 0; p < pairs_; ++p) {
        state_[p] = options_.closed[p] ? PairState::kClosed : PairState::kFree;
      }
    }
    for (std::size_t v = id; v != 0; v = nodes_[v].parent) state_[nodes_[v].pair] = nodes_[v].fixing;
  }

  void expand(std::size_t id, bool is_root) {
    load_state(id);
    double constant = 0.0;
    for (std::size_t p = 0; p < pairs_; ++p) {
      switch (state_[p]) {
        case PairState::kFree:
          unit_cost_[p] = relaxed_cost_[p];
          allowed_[p] = 1;
          break;
        case PairState::kOpen:
          unit_cost_[p] = instance_.variable_cost[p];
          allowed_[p] = 1;
          constant += instance_.fixed_cost[p];
          break;
        case PairState::kClosed:
          unit_cost_[p] = 0.0;
          allowed_[p] = 0;
          break;
      }
    }
    const BnBNode node = nodes_[id];
    const double parent_bound = is_root ? node.lower_bound : nodes_[node.parent].lower_bound;
    double achieved = 0.0;
    std::optional<FlowSolution> relaxed =
        detail::try_min_cost_flow(build_network(instance_, unit_cost_, allowed_), &achieved);
    if (!relaxed) {
      if (is_root) throw InfeasibleError(achieved, instance_.target);
      trace(id, node, parent_bound, parent_bound, false);
      return;
    }
    const double bound = relaxed->lp_cost + constant;
    trace(id, node, bound, parent_bound, true);
    // Children inherit at least the parent's bound.
    nodes_[id].lower_bound = is_root ? bound : std::max(bound, node.lower_bound);
    const double node_bound = nodes_[id].lower_bound;

    ScoredSolution scored = score(instance_, std::move(*relaxed));
    const std::size_t branch = pick_branch(scored.flow.g);
    if (!best_ || scored.true_cost < best_->true_cost) best_ = std::move(scored);
    if (node_bound >= cutoff() || branch == kNone) return;
    for (PairState fixing : {PairState::kClosed, PairState::kOpen}) {
      nodes_.push_back(BnBNode{id, branch, fixing, node.depth + 1, node_bound});
      open_.push(Pending{node_bound, node.depth + 1, nodes_.size() - 1});
    }
  }

  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  // Free pair with the largest relaxation flow among those whose fixed
  // charge is only partly paid (0 < g < c and a > 0).
  std::size_t pick_branch(const std::vector<double>& g) const {
    std::size_t chosen = kNone;
    for (std::size_t p = 0; p < pairs_; ++p) {
      if (state_[p] != PairState::kFree || instance_.fixed_cost[p] <= 0.0) continue;
      const double c = instance_.capacity_at(p);
      if (g[p] <= kFlowTolerance || g[p] >= c - kFlowTolerance * std::max(1.0, c)) continue;
      if (chosen == kNone || g[p] > g[chosen]) chosen = p;
    }
    return chosen;
  }

  void trace(std::size_t id, const BnBNode& node, double bound, double parent_bound,
             bool feasible) const {
    if (options_.on_node) {
      options_.on_node(NodeTrace{id, node.parent, node.depth, bound, parent_bound, feasible});
    }
  }

  const Instance& instance_;
  const ExactOptions& options_;
  std::size_t pairs_;
  std::vector<double> relaxed_cost_;
  std::vector<PairState> state_;
  std::vector<double> unit_cost_;
  std::vector<std::uint8_t> allowed_;
  std::vector<BnBNode> nodes_;
  std::priority_queue<Pending, std::vector<Pending>, std::greater<>> open_;
  std::optional<ScoredSolution> best_;
};

}  // namespace

ExactResult solve_exact(const Instance& instance, const ExactOptions& options) {
  if (!(options.budget_s > 0.0)) throw std::invalid_argument("exact solver budget must be positive");
  if (!(options.gap >= 0.0)) throw std::invalid_argument("gap must be non-negative");
  if (auto violations = structural_violations(instance); !violations.empty()) {
    throw ValidationError(violations.front());
  }
  if (!options.closed.empty() && options.closed.size() != instance.pair_count()) {
    throw ShapeError("closed mask shape does not match instance");
  }
  return BranchAndBound(instance, options).run();
}

ExactResult solve_exact(const Instance& instance, double budget_s, double gap) {
  ExactOptions options;
  options.budget_s = budget_s;
  options.gap = gap;
  return solve_exact(instance, options);
}

ExactResult brute_force(const Instance& instance) {
  const std::size_t pairs = instance.pair_count();
  if (pairs > kBruteForceMaxPairs) {
    throw std::invalid_argument("brute_force: " + std::to_string(pairs) +
                                " pairs exceeds the enumeration limit of " +
                                std::to_string(kBruteForceMaxPairs));
  }
  std::vector<std::size_t> candidates;
  for (std::size_t p = 0; p < pairs; ++p) {
    if (instance.available[p]) candidates.push_back(p);
  }

  // Open pairs route at variable cost only; each open set pays all of its
  // fixed costs, so the minimum over open sets is the ILP optimum.
  std::vector<std::uint8_t> open(pairs, 0);
  std::optional<ScoredSolution> best;
  double max_reached = 0.0;
  const std::uint64_t subsets = std::uint64_t{1} << candidates.size();
  for (std::uint64_t mask = subsets; mask-- > 0;) {
    double fixed = 0.0;
    double source_cap = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const std::size_t p = candidates[i];
      open[p] = (mask >> i) & 1;
      if (!open[p]) continue;
      fixed += instance.fixed_cost[p];
      if (instance.edges[instance.edge_of(p)].src == instance.source) {
        source_cap += instance.capacity_at(p);
      }
    }
    if (best && fixed >= best->true_cost) continue;
    if (source_cap < instance.target * (1.0 - 1e-12)) continue;
    double achieved = 0.0;
    std::optional<FlowSolution> flow = detail::try_min_cost_flow(
        build_network(instance, instance.variable_cost, open), &achieved);
    max_reached = std::max(max_reached, achieved);
    if (!flow) continue;
    ScoredSolution scored = score(instance, std::move(*flow));
    if (!best || scored.true_cost < best->true_cost) best = std::move(scored);
  }
  if (!best) throw InfeasibleError(max_reached, instance.target);
  ExactResult result;
  result.bound = best->true_cost;
  result.best = std::move(*best);
  result.proven_optimal = true;
  result.nodes_explored = static_cast<std::size_t>(subsets);
  return result;
}

ScoredSolution polish(const Instance& instance, const ScoredSolution& warm, double budget_s) {
  if (!(budget_s > 0.0)) return warm;
  if (warm.z.size() != instance.pair_count()) throw ShapeError("warm start shape mismatch");

  std::vector<std::uint8_t> touched(static_cast<std::size_t>(instance.vertex_count), 0);
  for (std::size_t p = 0; p < warm.z.size(); ++p) {
    if (!warm.z[p]) continue;
    const Edge& edge = instance.edges[instance.edge_of(p)];
    touched[static_cast<std::size_t>(edge.src)] = 1;
    touched[static_cast<std::size_t>(edge.dest)] = 1;
  }
  ExactOptions options;
  options.budget_s = budget_s;
  options.closed.assign(instance.pair_count(), 1);
  for (std::size_t e = 0; e < instance.edge_count(); ++e) {
    const Edge& edge = instance.edges[e];
    if (!touched[static_cast<std::size_t>(edge.src)] && !touched[static_cast<std::size_t>(edge.dest)]) {
      continue;
    }
    for (std::size_t k = 0; k < instance.capacity_count(); ++k) {
      options.closed[instance.pair_index(e, k)] = 0;
    }
  }
  options.incumbent = warm;
  try {
    ExactResult result = solve_exact(instance, options);
    if (result.best.true_cost < warm.true_cost) return std::move(result.best);
  } catch (const InfeasibleError&) {
    // The neighbourhood cannot route the target on its own; keep the warm start.
  }
  return warm;
}

}  // namespace mcfcnf
