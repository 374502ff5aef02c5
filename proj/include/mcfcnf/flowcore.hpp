#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "mcfcnf/instance.hpp"

namespace mcfcnf {

inline constexpr double kDefaultDMin = 1e-6;

// Fixed-cost scaling parameters, one per (edge, capacity) pair. A pair's
// fixed cost enters the surrogate LP as a_ek / d_ek.
struct Organism {
  // Distinguished value: the scaled fixed cost is exactly zero.
  static constexpr double kUnbounded = std::numeric_limits<double>::infinity();

  std::vector<double> d;

  static bool is_unbounded(double value) { return value == kUnbounded; }

  friend bool operator==(const Organism&, const Organism&) = default;
};

// The organism d_ek = c_k, whose surrogate LP is the LP relaxation of the ILP.
Organism slope_scaling_organism(const Instance& instance);

struct Arc {
  VertexId src = 0;
  VertexId dest = 0;
  double capacity = 0.0;
  double unit_cost = 0.0;
  std::size_t pair = 0;
};

struct ArcNetwork {
  int vertex_count = 0;
  VertexId source = 0;
  VertexId sink = 0;
  double target = 0.0;
  // Length of the dense per-pair arrays a solution maps back onto.
  std::size_t pair_count = 0;
  std::vector<Arc> arcs;
};

struct FlowSolution {
  // Flow per (edge, capacity) pair.
  std::vector<double> g;
  double lp_cost = 0.0;
};

// One arc per available pair, in pair order, with unit cost a/d + b.
ArcNetwork build_expanded_network(const Instance& instance, const Organism& organism);

// One arc per available pair with allowed[p] != 0, priced by unit_costs[p].
ArcNetwork build_network(const Instance& instance, std::span<const double> unit_costs,
                         std::span<const std::uint8_t> allowed);

// Min-cost flow of value `target` from source to sink by successive shortest
// augmenting paths with vertex potentials. Requires non-negative unit costs.
// Throws InfeasibleError with the achieved max flow when the target cannot
// be routed.
FlowSolution solve_min_cost_flow(const ArcNetwork& net);

// Optimal cost of the LP relaxation (arc costs a/c + b); a lower bound on
// the ILP optimum.
double lp_relaxation_bound(const Instance& instance);

// Surrogate LP objective of the flow g under the organism's arc costs.
double surrogate_cost(const Instance& instance, const Organism& organism,
                      std::span<const double> g);

}  // namespace mcfcnf
