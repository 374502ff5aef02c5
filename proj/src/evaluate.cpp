#include "mcfcnf/evaluate.hpp"

#include <cmath>

#include "detail/text.hpp"
#include "mcfcnf/simd/kernels.hpp"

namespace mcfcnf {

ScoredSolution score(const Instance& instance, FlowSolution flow) {
  if (flow.g.size() != instance.pair_count()) {
    throw ShapeError("flow has " + std::to_string(flow.g.size()) + " entries, instance has " +
                     std::to_string(instance.pair_count()) + " (edge, capacity) pairs");
  }
  ScoredSolution scored;
  scored.z.resize(flow.g.size());
  scored.true_cost = simd::true_cost(instance.fixed_cost, instance.variable_cost, flow.g,
                                     kFlowTolerance, scored.z);
  scored.flow = std::move(flow);
  return scored;
}

std::vector<FlowViolation> verify_flow(const Instance& instance, const FlowSolution& flow,
                                       double tol) {
  if (flow.g.size() != instance.pair_count()) throw ShapeError("flow shape does not match instance");
  using Kind = FlowViolation::Kind;
  std::vector<FlowViolation> out;
  std::vector<double> balance(static_cast<std::size_t>(instance.vertex_count), 0.0);
  double source_out = 0.0;

  for (std::size_t p = 0; p < flow.g.size(); ++p) {
    const double g = flow.g[p];
    const int e = static_cast<int>(instance.edge_of(p));
    const int k = static_cast<int>(instance.capacity_of(p));
    const std::string where = "edge " + std::to_string(e) + ", capacity " + std::to_string(k);
    if (g < -tol) {
      out.push_back({Kind::kNegative, e, k, -1, -g, where + ": negative flow"});
    }
    if (!instance.available[p] && std::abs(g) > tol) {
      out.push_back({Kind::kUnavailable, e, k, -1, std::abs(g),
                     where + ": flow on an unavailable capacity"});
    }
    // With z from the flow itself, f <= c z reduces to f <= c.
    const double over = g - instance.capacity_at(p);
    if (g > kFlowTolerance && over > tol) {
      out.push_back({Kind::kCapacity, e, k, -1, over,
                     where + ": flow exceeds capacity by " + detail::format_number(over)});
    }
    const Edge& edge = instance.edges[static_cast<std::size_t>(e)];
    balance[static_cast<std::size_t>(edge.src)] -= g;
    balance[static_cast<std::size_t>(edge.dest)] += g;
    if (edge.src == instance.source) source_out += g;
  }

  for (int v = 0; v < instance.vertex_count; ++v) {
    if (v == instance.source || v == instance.sink) continue;
    const double residual = std::abs(balance[static_cast<std::size_t>(v)]);
    if (residual > tol) {
      out.push_back({Kind::kConservation, -1, -1, v, residual,
                     "vertex " + std::to_string(v) + ": inflow and outflow differ by " +
                         detail::format_number(residual)});
    }
  }
  const double shortfall = std::abs(source_out - instance.target);
  if (shortfall > tol) {
    out.push_back({Kind::kTarget, -1, -1, instance.source, shortfall,
                   "source outflow " + detail::format_number(source_out) +
                       " differs from target " + detail::format_number(instance.target)});
  }
  return out;
}

void write_solution_csv(std::ostream& out, const Instance& instance,
                        const ScoredSolution& solution) {
  out << "edge_index,capacity_index,flow,z\n";
  for (std::size_t p = 0; p < solution.flow.g.size(); ++p) {
    const double g = solution.flow.g[p];
    if (!(g > 0.0)) continue;
    out << instance.edge_of(p) << ',' << instance.capacity_of(p) << ','
        << detail::format_number(g) << ',' << static_cast<int>(solution.z[p]) << '\n';
  }
  out << "# true_cost=" << detail::format_number(solution.true_cost) << '\n';
}

}  // namespace mcfcnf
