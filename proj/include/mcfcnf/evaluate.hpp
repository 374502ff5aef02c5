#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "mcfcnf/flowcore.hpp"
#include "mcfcnf/instance.hpp"

namespace mcfcnf {

// A pair counts as used when its flow exceeds this.
inline constexpr double kFlowTolerance = 1e-9;
inline constexpr double kVerifyTolerance = 1e-7;

struct ScoredSolution {
  FlowSolution flow;
  std::vector<std::uint8_t> z;
  // ILP objective of the flow: fixed cost of every used pair plus
  // variable cost per unit.
  double true_cost = 0.0;
};

// Edge-use indicators and true cost. Does not check that the flow is valid.
ScoredSolution score(const Instance& instance, FlowSolution flow);

struct FlowViolation {
  enum class Kind { kCapacity, kNegative, kUnavailable, kConservation, kTarget };
  Kind kind;
  int edge = -1;
  int capacity = -1;
  int vertex = -1;
  // Amount by which the constraint is exceeded.
  double residual = 0.0;
  std::string message;
};

// Capacity, conservation and target checks at absolute tolerance `tol`.
std::vector<FlowViolation> verify_flow(const Instance& instance, const FlowSolution& flow,
                                       double tol = kVerifyTolerance);

// CSV: header edge_index,capacity_index,flow,z; one row per pair with
// positive flow; trailer "# true_cost=<value>".
void write_solution_csv(std::ostream& out, const Instance& instance,
                        const ScoredSolution& solution);

}  // namespace mcfcnf
