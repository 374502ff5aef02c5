#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "mcfcnf/evaluate.hpp"
#include "mcfcnf/instance.hpp"

namespace mcfcnf {

inline constexpr double kDefaultGap = 1e-6;

enum class PairState : std::uint8_t { kFree, kOpen, kClosed };

// Search node: a partial assignment of the use indicators. Nodes are kept
// as a parent chain, each adding one fixing.
struct BnBNode {
  std::size_t parent = 0;  // index of the parent node; root is its own parent
  std::size_t pair = 0;    // pair fixed by this node (unused at the root)
  PairState fixing = PairState::kFree;
  int depth = 0;
  // Bound inherited from the parent until this node's relaxation is solved.
  double lower_bound = 0.0;
};

struct NodeTrace {
  std::size_t node = 0;
  std::size_t parent = 0;
  int depth = 0;
  double lower_bound = 0.0;
  double parent_lower_bound = 0.0;
  bool feasible = true;
};

struct ExactOptions {
  double budget_s = 60.0;
  double gap = kDefaultGap;
  // Pairs forced to y = 0 for the whole search; empty means none.
  std::vector<std::uint8_t> closed;
  std::optional<ScoredSolution> incumbent;
  std::function<void(const NodeTrace&)> on_node;
};

struct ExactResult {
  ScoredSolution best;
  bool proven_optimal = false;
  double bound = 0.0;
  std::size_t nodes_explored = 0;
};

// Best-first branch-and-bound on the use indicators. Each node relaxes the
// free pairs to cost a/c + b, prices open pairs at b plus their fixed cost
// as a constant, and drops closed pairs. The root is always solved, so a
// result is returned even when the budget is already spent.
ExactResult solve_exact(const Instance& instance, const ExactOptions& options);
ExactResult solve_exact(const Instance& instance, double budget_s, double gap = kDefaultGap);

inline constexpr std::size_t kBruteForceMaxPairs = 20;

// Enumerates every open set of pairs; requires pair_count() <= 20.
ExactResult brute_force(const Instance& instance);

// Improves `warm` with a branch-and-bound restricted to the edges touching
// a vertex of a used edge. Never returns a costlier solution than `warm`.
ScoredSolution polish(const Instance& instance, const ScoredSolution& warm, double budget_s);

}  // namespace mcfcnf
