#pragma once

#include <optional>

#include "mcfcnf/flowcore.hpp"

namespace mcfcnf::detail {

// solve_min_cost_flow without the exception: nullopt when the target cannot
// be routed, with the max flow reached stored in *achieved.
std::optional<FlowSolution> try_min_cost_flow(const ArcNetwork& net, double* achieved);

}  // namespace mcfcnf::detail
