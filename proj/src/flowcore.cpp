#include "mcfcnf/flowcore.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <stdexcept>
#include <string>

#include "detail/flow.hpp"
#include "mcfcnf/simd/kernels.hpp"

namespace mcfcnf {

Organism slope_scaling_organism(const Instance& instance) {
  return Organism{instance.expanded_capacities()};
}

ArcNetwork build_network(const Instance& instance, std::span<const double> unit_costs,
                         std::span<const std::uint8_t> allowed) {
  const std::size_t pairs = instance.pair_count();
  if (unit_costs.size() != pairs || allowed.size() != pairs) {
    throw ShapeError("build_network: arrays must have one entry per (edge, capacity) pair");
  }
  ArcNetwork net;
  net.vertex_count = instance.vertex_count;
  net.source = instance.source;
  net.sink = instance.sink;
  net.target = instance.target;
  net.pair_count = pairs;
  net.arcs.reserve(pairs);
  for (std::size_t p = 0; p < pairs; ++p) {
    if (!instance.available[p] || !allowed[p]) continue;
    const Edge& edge = instance.edges[instance.edge_of(p)];
    net.arcs.push_back(Arc{edge.src, edge.dest, instance.capacity_at(p), unit_costs[p], p});
  }
  return net;
}

namespace {

void check_organism(const Instance& instance, const Organism& organism) {
  if (organism.d.size() != instance.pair_count()) {
    throw ShapeError("organism has " + std::to_string(organism.d.size()) +
                     " entries, instance has " + std::to_string(instance.pair_count()) +
                     " (edge, capacity) pairs");
  }
  for (double d : organism.d) {
    if (!(d > 0.0)) throw std::invalid_argument("organism entries must be positive");
  }
}

std::vector<double> scaled_costs(const Instance& instance, const Organism& organism) {
  check_organism(instance, organism);
  std::vector<double> costs(instance.pair_count());
  simd::scaled_unit_costs(instance.fixed_cost, instance.variable_cost, organism.d, costs);
  return costs;
}

}  // namespace

ArcNetwork build_expanded_network(const Instance& instance, const Organism& organism) {
  return build_network(instance, scaled_costs(instance, organism), instance.available);
}

namespace detail {

std::optional<FlowSolution> try_min_cost_flow(const ArcNetwork& net, double* achieved) {
  const std::size_t m = net.arcs.size();
  const std::size_t n = static_cast<std::size_t>(net.vertex_count);
  for (const Arc& arc : net.arcs) {
    if (!(arc.unit_cost >= 0.0) || !std::isfinite(arc.unit_cost)) {
      throw std::invalid_argument("min-cost flow requires finite non-negative arc costs");
    }
    if (arc.pair >= net.pair_count) throw ShapeError("arc refers to a pair out of range");
  }

  // Residual arc 2i is arc i forward, 2i + 1 its reverse. Out-lists hold
  // residual arcs in increasing index order.
  std::vector<double> residual(2 * m);
  std::vector<double> cost(2 * m);
  std::vector<std::size_t> head_of(2 * m);
  std::vector<std::size_t> start(n + 1, 0);
  for (std::size_t i = 0; i < m; ++i) {
    const Arc& arc = net.arcs[i];
    residual[2 * i] = arc.capacity;
    residual[2 * i + 1] = 0.0;
    cost[2 * i] = arc.unit_cost;
    cost[2 * i + 1] = -arc.unit_cost;
    head_of[2 * i] = static_cast<std::size_t>(arc.dest);
    head_of[2 * i + 1] = static_cast<std::size_t>(arc.src);
    ++start[static_cast<std::size_t>(arc.src) + 1];
    ++start[static_cast<std::size_t>(arc.dest) + 1];
  }
  for (std::size_t v = 0; v < n; ++v) start[v + 1] += start[v];
  std::vector<std::size_t> out_arcs(2 * m);
  {
    std::vector<std::size_t> fill(start.begin(), start.end() - 1);
    for (std::size_t r = 0; r < 2 * m; ++r) {
      const std::size_t tail = head_of[r ^ 1];
      out_arcs[fill[tail]++] = r;
    }
  }

  const double eps = 1e-12 * std::max(1.0, net.target);
  const double inf = std::numeric_limits<double>::infinity();
  constexpr std::size_t kNoArc = std::numeric_limits<std::size_t>::max();
  const std::size_t s = static_cast<std::size_t>(net.source);
  const std::size_t t = static_cast<std::size_t>(net.sink);

  std::vector<double> potential(n, 0.0);
  std::vector<double> dist(n);
  std::vector<std::size_t> pred(n);
  std::vector<std::uint8_t> done(n);
  using Label = std::pair<double, std::size_t>;
  std::priority_queue<Label, std::vector<Label>, std::greater<>> heap;

  double remaining = net.target;
  const std::size_t iteration_cap = 4 * m + 16;
  std::size_t iterations = 0;
  while (remaining > eps) {
    if (++iterations > iteration_cap) {
      throw std::logic_error("min-cost flow exceeded its augmentation limit");
    }
    std::fill(dist.begin(), dist.end(), inf);
    std::fill(pred.begin(), pred.end(), kNoArc);
    std::fill(done.begin(), done.end(), 0);
    dist[s] = 0.0;
    heap.push({0.0, s});
    while (!heap.empty()) {
      const auto [d, u] = heap.top();
      heap.pop();
      if (done[u] || d > dist[u]) continue;
      done[u] = 1;
      if (u == t) break;
      for (std::size_t i = start[u]; i < start[u + 1]; ++i) {
        const std::size_t r = out_arcs[i];
        if (residual[r] <= eps) continue;
        const std::size_t v = head_of[r];
        if (done[v]) continue;
        const double reduced = std::max(0.0, cost[r] + potential[u] - potential[v]);
        const double candidate = d + reduced;
        if (candidate < dist[v]) {
          dist[v] = candidate;
          pred[v] = r;
          heap.push({candidate, v});
        } else if (candidate == dist[v] && r < pred[v]) {
          pred[v] = r;
        }
      }
    }
    while (!heap.empty()) heap.pop();
    if (dist[t] == inf) {
      if (achieved != nullptr) *achieved = net.target - remaining;
      return std::nullopt;
    }

    for (std::size_t v = 0; v < n; ++v) potential[v] += std::min(dist[v], dist[t]);

    double bottleneck = remaining;
    for (std::size_t v = t; v != s; v = head_of[pred[v] ^ 1]) {
      bottleneck = std::min(bottleneck, residual[pred[v]]);
    }
    for (std::size_t v = t; v != s; v = head_of[pred[v] ^ 1]) {
      residual[pred[v]] -= bottleneck;
      residual[pred[v] ^ 1] += bottleneck;
    }
    remaining -= bottleneck;
  }

  FlowSolution solution;
  solution.g.assign(net.pair_count, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double flow = residual[2 * i + 1];
    solution.g[net.arcs[i].pair] += flow;
    solution.lp_cost += net.arcs[i].unit_cost * flow;
  }
  if (achieved != nullptr) *achieved = net.target;
  return solution;
}

}  // namespace detail

FlowSolution solve_min_cost_flow(const ArcNetwork& net) {
  double achieved = 0.0;
  std::optional<FlowSolution> solution = detail::try_min_cost_flow(net, &achieved);
  if (!solution) throw InfeasibleError(achieved, net.target);
  return std::move(*solution);
}

double lp_relaxation_bound(const Instance& instance) {
  return solve_min_cost_flow(build_expanded_network(instance, slope_scaling_organism(instance)))
      .lp_cost;
}

double surrogate_cost(const Instance& instance, const Organism& organism,
                      std::span<const double> g) {
  if (g.size() != instance.pair_count()) throw ShapeError("flow shape does not match instance");
  const std::vector<double> costs = scaled_costs(instance, organism);
  return simd::dot(costs, g);
}

}  // namespace mcfcnf
