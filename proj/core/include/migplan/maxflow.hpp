#pragma once

#include <string>
#include <vector>

#include "migplan/topology.hpp"

namespace migplan {

/// Flow assigned to one explicit path, bytes/second.
struct PathFlow {
  Path path;
  double flow_Bps = 0;
};

struct MaxFlowResult {
  double value_Bps = 0;
  std::vector<PathFlow> paths;  // simple-path decomposition of the flow
};

/// Maximum single-commodity flow from src to dst. Shared-capacity groups are
/// honored: the combined flow of both directions of a cable stays within the
/// cable capacity.
MaxFlowResult max_flow(const NetworkTopology& topology, const std::string& src,
                       const std::string& dst);
MaxFlowResult max_flow(const NetworkTopology& topology, int src, int dst);

}  // namespace migplan
