#include "mcfcnf/instance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "detail/text.hpp"

namespace mcfcnf {

void Instance::add_edge(VertexId src, VertexId dest, const std::vector<double>& fixed,
                        const std::vector<double>& variable) {
  if (fixed.size() != capacities.size() || variable.size() != capacities.size()) {
    throw ShapeError("add_edge: expected one cost per capacity class");
  }
  edges.push_back(Edge{src, dest});
  fixed_cost.insert(fixed_cost.end(), fixed.begin(), fixed.end());
  variable_cost.insert(variable_cost.end(), variable.begin(), variable.end());
  available.insert(available.end(), capacities.size(), 1);
}

void Instance::mark_unavailable(std::size_t edge, std::size_t capacity) {
  const std::size_t p = pair_index(edge, capacity);
  available.at(p) = 0;
  fixed_cost[p] = 0.0;
  variable_cost[p] = 0.0;
}

double Instance::mean_fixed_cost() const {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t p = 0; p < fixed_cost.size(); ++p) {
    if (available[p]) {
      sum += fixed_cost[p];
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

std::vector<double> Instance::expanded_capacities() const {
  std::vector<double> out(pair_count());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = capacity_at(p);
  return out;
}

namespace {

std::string pair_name(std::size_t edge, std::size_t capacity) {
  return "edge " + std::to_string(edge) + ", capacity " + std::to_string(capacity);
}

// Dinic max flow over real-valued capacities.
class MaxFlow {
 public:
  explicit MaxFlow(int n) : head_(static_cast<std::size_t>(n), -1) {}

  void add_arc(int from, int to, double cap) {
    arcs_.push_back({to, head_[from], cap});
    head_[from] = static_cast<int>(arcs_.size()) - 1;
    arcs_.push_back({from, head_[to], 0.0});
    head_[to] = static_cast<int>(arcs_.size()) - 1;
  }

  double run(int s, int t) {
    double total = 0.0;
    while (build_levels(s, t)) {
      cursor_ = head_;
      while (true) {
        const double pushed = augment(s, t, std::numeric_limits<double>::infinity());
        if (pushed <= kEps) break;
        total += pushed;
      }
    }
    return total;
  }

 private:
  static constexpr double kEps = 1e-12;

  struct Arc {
    int to;
    int next;
    double cap;
  };

  bool build_levels(int s, int t) {
    level_.assign(head_.size(), -1);
    std::queue<int> queue;
    level_[s] = 0;
    queue.push(s);
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop();
      for (int a = head_[v]; a != -1; a = arcs_[a].next) {
        if (arcs_[a].cap > kEps && level_[arcs_[a].to] < 0) {
          level_[arcs_[a].to] = level_[v] + 1;
          queue.push(arcs_[a].to);
        }
      }
    }
    return level_[t] >= 0;
  }

  double augment(int v, int t, double limit) {
    if (v == t) return limit;
    for (int& a = cursor_[v]; a != -1; a = arcs_[a].next) {
      Arc& arc = arcs_[a];
      if (arc.cap <= kEps || level_[arc.to] != level_[v] + 1) continue;
      const double pushed = augment(arc.to, t, std::min(limit, arc.cap));
      if (pushed > kEps) {
        arc.cap -= pushed;
        arcs_[a ^ 1].cap += pushed;
        return pushed;
      }
    }
    return 0.0;
  }

  std::vector<int> head_;
  std::vector<int> cursor_;
  std::vector<int> level_;
  std::vector<Arc> arcs_;
};

bool vertex_ok(const Instance& instance, VertexId v) {
  return v >= 0 && v < instance.vertex_count;
}

}  // namespace

std::vector<std::string> structural_violations(const Instance& instance) {
  std::vector<std::string> out;
  if (instance.vertex_count < 2) out.push_back("vertex count must be at least 2");
  if (!vertex_ok(instance, instance.source)) out.push_back("source_id out of range");
  if (!vertex_ok(instance, instance.sink)) out.push_back("sink_id out of range");
  if (instance.source == instance.sink) out.push_back("source_id must differ from sink_id");
  if (!(instance.target > 0.0) || !std::isfinite(instance.target)) {
    out.push_back("target must be positive");
  }
  if (instance.capacities.empty()) out.push_back("at least one capacity is required");
  for (std::size_t k = 0; k < instance.capacities.size(); ++k) {
    const double c = instance.capacities[k];
    if (!(c > 0.0) || !std::isfinite(c)) {
      out.push_back("capacity " + std::to_string(k) + ": must be positive");
    } else if (k > 0 && !(c > instance.capacities[k - 1])) {
      out.push_back("capacity " + std::to_string(k) + ": capacities must be strictly increasing");
    }
  }
  const std::size_t pairs = instance.pair_count();
  if (instance.fixed_cost.size() != pairs || instance.variable_cost.size() != pairs ||
      instance.available.size() != pairs) {
    out.push_back("cost table shape does not match edges x capacities");
    return out;
  }
  for (std::size_t e = 0; e < instance.edge_count(); ++e) {
    const Edge& edge = instance.edges[e];
    if (!vertex_ok(instance, edge.src)) {
      out.push_back("edge " + std::to_string(e) + ": src " + std::to_string(edge.src) +
                    " out of range");
    }
    if (!vertex_ok(instance, edge.dest)) {
      out.push_back("edge " + std::to_string(e) + ": dest " + std::to_string(edge.dest) +
                    " out of range");
    }
    if (edge.src == edge.dest) {
      out.push_back("edge " + std::to_string(e) + ": self-loop at vertex " +
                    std::to_string(edge.src));
    }
    for (std::size_t k = 0; k < instance.capacity_count(); ++k) {
      const std::size_t p = instance.pair_index(e, k);
      if (!instance.available[p]) continue;
      const double a = instance.fixed_cost[p];
      const double b = instance.variable_cost[p];
      if (!(a >= 0.0) || !std::isfinite(a)) {
        out.push_back(pair_name(e, k) + ": fixed cost must be non-negative");
      }
      if (!(b >= 0.0) || !std::isfinite(b)) {
        out.push_back(pair_name(e, k) + ": variable cost must be non-negative");
      }
    }
  }
  return out;
}

double max_flow_value(const Instance& instance) {
  MaxFlow flow(instance.vertex_count);
  for (std::size_t e = 0; e < instance.edge_count(); ++e) {
    double largest = 0.0;
    for (std::size_t k = 0; k < instance.capacity_count(); ++k) {
      if (instance.available[instance.pair_index(e, k)]) {
        largest = std::max(largest, instance.capacities[k]);
      }
    }
    if (largest > 0.0) flow.add_arc(instance.edges[e].src, instance.edges[e].dest, largest);
  }
  return flow.run(instance.source, instance.sink);
}

std::vector<std::string> validate(const Instance& instance) {
  std::vector<std::string> out = structural_violations(instance);
  if (!out.empty()) return out;
  const double reachable = max_flow_value(instance);
  if (reachable + 1e-9 * std::max(1.0, instance.target) < instance.target) {
    out.push_back("target exceeds max flow (target=" + detail::format_number(instance.target) +
                  ", max_flow=" + detail::format_number(reachable) + ")");
  }
  return out;
}

Instance from_facility_form(const FacilityInstance& facility) {
  const auto check_vertex = [&](VertexId v, std::string_view role) {
    if (v < 0 || v >= facility.vertex_count) {
      throw ValidationError(std::string(role) + " vertex " + std::to_string(v) +
                            " is not in the transport graph");
    }
  };
  for (const Terminal& t : facility.sources) check_vertex(t.vertex, "source");
  for (const Terminal& t : facility.sinks) check_vertex(t.vertex, "sink");
  const std::size_t transport_k = facility.capacities.size();
  if (facility.fixed_cost.size() != facility.edges.size() * transport_k ||
      facility.variable_cost.size() != facility.fixed_cost.size() ||
      facility.available.size() != facility.fixed_cost.size()) {
    throw ShapeError("facility cost table shape does not match edges x capacities");
  }

  // Terminal limits join the shared capacity list.
  std::vector<double> capacities = facility.capacities;
  for (const Terminal& t : facility.sources) capacities.push_back(t.limit);
  for (const Terminal& t : facility.sinks) capacities.push_back(t.limit);
  std::sort(capacities.begin(), capacities.end());
  capacities.erase(std::unique(capacities.begin(), capacities.end()), capacities.end());
  const auto class_of = [&](double c) {
    return static_cast<std::size_t>(
        std::lower_bound(capacities.begin(), capacities.end(), c) - capacities.begin());
  };

  Instance out;
  out.vertex_count = facility.vertex_count + 2;
  out.source = facility.vertex_count;
  out.sink = facility.vertex_count + 1;
  out.target = facility.target;
  out.capacities = capacities;
  const std::size_t K = capacities.size();

  const auto append_edge = [&](Edge edge) {
    out.edges.push_back(edge);
    out.fixed_cost.insert(out.fixed_cost.end(), K, 0.0);
    out.variable_cost.insert(out.variable_cost.end(), K, 0.0);
    out.available.insert(out.available.end(), K, 0);
    return out.edges.size() - 1;
  };
  const auto set_pair = [&](std::size_t e, std::size_t k, double a, double b) {
    const std::size_t p = out.pair_index(e, k);
    out.fixed_cost[p] = a;
    out.variable_cost[p] = b;
    out.available[p] = 1;
  };

  for (const Terminal& t : facility.sources) {
    const std::size_t e = append_edge(Edge{out.source, t.vertex});
    set_pair(e, class_of(t.limit), t.open_cost, t.unit_cost);
  }
  for (std::size_t e = 0; e < facility.edges.size(); ++e) {
    const std::size_t copy = append_edge(facility.edges[e]);
    for (std::size_t k = 0; k < transport_k; ++k) {
      const std::size_t p = e * transport_k + k;
      if (facility.available[p]) {
        set_pair(copy, class_of(facility.capacities[k]), facility.fixed_cost[p],
                 facility.variable_cost[p]);
      }
    }
  }
  for (const Terminal& t : facility.sinks) {
    const std::size_t e = append_edge(Edge{t.vertex, out.sink});
    set_pair(e, class_of(t.limit), t.open_cost, t.unit_cost);
  }
  return out;
}

GeneratorKind parse_generator_kind(std::string_view name) {
  if (name == "grid") return GeneratorKind::kGrid;
  if (name == "geometric") return GeneratorKind::kGeometric;
  throw std::invalid_argument("unknown generator kind '" + std::string(name) + "'");
}

}  // namespace mcfcnf
