#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mcfcnf/common.hpp"

namespace mcfcnf {

struct Edge {
  VertexId src = 0;
  VertexId dest = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Multi-capacity fixed-charge network flow instance.
//
// Capacity classes are shared by all edges; costs are stored per
// (edge, capacity) pair in edge-major order, pair index = edge * |K| + k.
// A pair an edge does not offer is marked in `available` and its costs are
// stored as zero.
struct Instance {
  int vertex_count = 0;
  VertexId source = 0;
  VertexId sink = 0;
  std::vector<Edge> edges;
  std::vector<double> capacities;
  std::vector<double> fixed_cost;
  std::vector<double> variable_cost;
  std::vector<std::uint8_t> available;
  double target = 0.0;

  std::size_t edge_count() const { return edges.size(); }
  std::size_t capacity_count() const { return capacities.size(); }
  std::size_t pair_count() const { return edges.size() * capacities.size(); }
  std::size_t pair_index(std::size_t edge, std::size_t capacity) const {
    return edge * capacities.size() + capacity;
  }
  std::size_t edge_of(std::size_t pair) const { return pair / capacities.size(); }
  std::size_t capacity_of(std::size_t pair) const { return pair % capacities.size(); }
  double capacity_at(std::size_t pair) const { return capacities[capacity_of(pair)]; }

  // Appends an edge with every capacity class available; costs are given
  // per class in order.
  void add_edge(VertexId src, VertexId dest, const std::vector<double>& fixed,
                const std::vector<double>& variable);
  void mark_unavailable(std::size_t edge, std::size_t capacity);

  // Mean fixed cost over available pairs, 0 when there are none.
  double mean_fixed_cost() const;

  // Per-pair capacity array (c_k repeated per edge).
  std::vector<double> expanded_capacities() const;

  friend bool operator==(const Instance&, const Instance&) = default;
};

// Source or sink facility in a multi-terminal instance.
struct Terminal {
  VertexId vertex = 0;
  double open_cost = 0.0;
  double unit_cost = 0.0;
  // Maximum rate for sources, storage capacity for sinks.
  double limit = 0.0;

  friend bool operator==(const Terminal&, const Terminal&) = default;
};

// Multi-source, multi-sink instance with node costs. The transport graph
// uses the same per-pair layout as Instance.
struct FacilityInstance {
  int vertex_count = 0;
  std::vector<Edge> edges;
  std::vector<double> capacities;
  std::vector<double> fixed_cost;
  std::vector<double> variable_cost;
  std::vector<std::uint8_t> available;
  std::vector<Terminal> sources;
  std::vector<Terminal> sinks;
  double target = 0.0;

  friend bool operator==(const FacilityInstance&, const FacilityInstance&) = default;
};

// --- text format ---------------------------------------------------------

Instance parse_instance(std::string_view text);
Instance load_instance(const std::filesystem::path& path);
std::string format_instance(const Instance& instance);
void save_instance(const std::filesystem::path& path, const Instance& instance);

FacilityInstance parse_facility_instance(std::string_view text);
FacilityInstance load_facility_instance(const std::filesystem::path& path);
std::string format_facility_instance(const FacilityInstance& instance);

// --- validation ----------------------------------------------------------

// Violations of the structural invariants (ids, signs, ordering, target).
std::vector<std::string> structural_violations(const Instance& instance);

// Structural violations plus the routing check: max s-t flow, taking the
// largest available capacity on each edge, must reach the target. Empty
// means valid.
std::vector<std::string> validate(const Instance& instance);

// Max s-t flow where each edge carries at most its largest available capacity.
double max_flow_value(const Instance& instance);

// --- construction --------------------------------------------------------

// Adds a supersource (id vertex_count) and supersink (id vertex_count + 1).
// Each terminal becomes one edge whose only available class equals its limit.
Instance from_facility_form(const FacilityInstance& facility);

enum class GeneratorKind { kGrid, kGeometric };

GeneratorKind parse_generator_kind(std::string_view name);

struct CostParams {
  // Fixed cost of the smallest class per unit edge length.
  double fixed_min = 20.0;
  double fixed_max = 100.0;
  // Variable cost of the smallest class.
  double variable_min = 1.0;
  double variable_max = 5.0;
  double base_capacity = 5.0;
  double capacity_growth = 2.0;
  // a_ek grows like c_k^economy_exponent; below 1 gives bulk discounts.
  double economy_exponent = 0.6;
};

Instance generate_random(GeneratorKind kind, int n_vertices, int n_capacities,
                         const CostParams& costs, double target_fraction,
                         std::uint64_t seed);

}  // namespace mcfcnf
