#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mcfcnf/instance.hpp"

namespace mcfcnf {
namespace {

struct RawEdge {
  VertexId src;
  VertexId dest;
  double length;
};

struct Topology {
  int vertex_count = 0;
  VertexId source = 0;
  VertexId sink = 0;
  std::vector<RawEdge> edges;
};

double round_cents(double x) { return std::round(x * 100.0) / 100.0; }

std::vector<double> capacity_ladder(const CostParams& costs, int n_capacities) {
  std::vector<double> capacities;
  for (int k = 0; k < n_capacities; ++k) {
    double c = std::round(costs.base_capacity * std::pow(costs.capacity_growth, k));
    c = std::max(c, 1.0);
    if (!capacities.empty() && c <= capacities.back()) c = capacities.back() + 1.0;
    capacities.push_back(c);
  }
  return capacities;
}

// Row-major lattice over n cells; the last row may be partial. Edges run
// rightward within a row and both ways between rows. The supersource feeds
// the first column and the last cell of each row feeds the sink.
Topology grid_topology(int n) {
  const int rows = std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(n)))));
  const int cols = (n + rows - 1) / rows;
  Topology topo;
  topo.vertex_count = n + 2;
  topo.source = n;
  topo.sink = n + 1;
  const auto cell = [&](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int v = cell(r, c);
      if (v >= n) continue;
      if (c + 1 < cols && cell(r, c + 1) < n) topo.edges.push_back({v, cell(r, c + 1), 1.0});
      if (r + 1 < rows && cell(r + 1, c) < n) {
        topo.edges.push_back({v, cell(r + 1, c), 1.0});
        topo.edges.push_back({cell(r + 1, c), v, 1.0});
      }
    }
  }
  for (int r = 0; r < rows; ++r) {
    if (cell(r, 0) < n) topo.edges.push_back({topo.source, cell(r, 0), 1.0});
  }
  for (int r = 0; r < rows; ++r) {
    const int last = std::min(cell(r, cols - 1), n - 1);
    if (last >= cell(r, 0)) topo.edges.push_back({last, topo.sink, 1.0});
  }
  return topo;
}

// Uniform points in the unit square joined to their nearest neighbours in
// both directions; source and sink are the leftmost and rightmost points.
Topology geometric_topology(int n, Rng& rng) {
  std::vector<double> x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[i] = rng.uniform01();
    y[i] = rng.uniform01();
  }
  Topology topo;
  topo.vertex_count = n;
  topo.source = static_cast<VertexId>(std::min_element(x.begin(), x.end()) - x.begin());
  topo.sink = static_cast<VertexId>(std::max_element(x.begin(), x.end()) - x.begin());
  const int neighbours = std::min(n - 1, 5);
  const auto dist = [&](int a, int b) { return std::hypot(x[a] - x[b], y[a] - y[b]); };

  std::vector<std::vector<std::uint8_t>> linked(n, std::vector<std::uint8_t>(n, 0));
  std::vector<int> order(n);
  for (int u = 0; u < n; ++u) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return dist(u, a) < dist(u, b); });
    int taken = 0;
    for (int v : order) {
      if (v == u) continue;
      linked[std::min(u, v)][std::max(u, v)] = 1;
      if (++taken == neighbours) break;
    }
  }
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (!linked[u][v]) continue;
      const double length = dist(u, v) * std::sqrt(static_cast<double>(n));
      if (v != topo.source && u != topo.sink) topo.edges.push_back({u, v, length});
      if (u != topo.source && v != topo.sink) topo.edges.push_back({v, u, length});
    }
  }
  return topo;
}

Instance price(const Topology& topo, const CostParams& costs, int n_capacities,
               double target_fraction, Rng& rng) {
  Instance instance;
  instance.vertex_count = topo.vertex_count;
  instance.source = topo.source;
  instance.sink = topo.sink;
  instance.capacities = capacity_ladder(costs, n_capacities);
  const std::vector<double>& c = instance.capacities;
  for (const RawEdge& raw : topo.edges) {
    const double scale = std::max(raw.length, 0.05);
    std::vector<double> fixed(c.size()), variable(c.size());
    fixed[0] = std::max(1.0, std::round(rng.uniform(costs.fixed_min, costs.fixed_max) * scale));
    const double unit = rng.uniform(costs.variable_min, costs.variable_max) * scale;
    variable[0] = std::max(0.01, round_cents(unit));
    for (std::size_t k = 1; k < c.size(); ++k) {
      double a = std::round(fixed[0] * std::pow(c[k] / c[0], costs.economy_exponent));
      // Keep a/c strictly decreasing after rounding.
      if (a / c[k] >= fixed[k - 1] / c[k - 1]) a = std::ceil(fixed[k - 1] * c[k] / c[k - 1]) - 1.0;
      fixed[k] = a;
      variable[k] = std::max(0.01, round_cents(unit * std::pow(c[0] / c[k], 0.1)));
    }
    instance.add_edge(raw.src, raw.dest, fixed, variable);
  }
  const double reachable = max_flow_value(instance);
  instance.target = std::max(1.0, std::floor(target_fraction * reachable));
  return instance;
}

}  // namespace

Instance generate_random(GeneratorKind kind, int n_vertices, int n_capacities,
                         const CostParams& costs, double target_fraction,
                         std::uint64_t seed) {
  if (n_vertices < 2) throw std::invalid_argument("need at least 2 vertices");
  if (n_capacities < 1) throw std::invalid_argument("need at least 1 capacity");
  if (!(target_fraction > 0.0 && target_fraction <= 1.0)) {
    throw std::invalid_argument("target fraction must be in (0, 1]");
  }
  if (!(costs.fixed_min > 0.0 && costs.fixed_max >= costs.fixed_min &&
        costs.variable_min >= 0.0 && costs.variable_max >= costs.variable_min &&
        costs.base_capacity >= 1.0 && costs.capacity_growth > 1.0 &&
        costs.economy_exponent > 0.0 && costs.economy_exponent < 1.0)) {
    throw std::invalid_argument("invalid cost parameters");
  }

  constexpr int kAttempts = 200;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    Rng rng(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(attempt));
    const Topology topo =
        kind == GeneratorKind::kGrid ? grid_topology(n_vertices) : geometric_topology(n_vertices, rng);
    Instance instance = price(topo, costs, n_capacities, target_fraction, rng);
    if (validate(instance).empty()) return instance;
  }
  throw std::runtime_error("generator could not produce a connected instance");
}

}  // namespace mcfcnf
