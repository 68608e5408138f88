#pragma once

#include <span>
#include <string>
#include <vector>

#include "migplan/maxflow.hpp"
#include "migplan/request.hpp"
#include "migplan/topology.hpp"

namespace migplan {

/// Batch cost = w_time * batch migration time + w_count * batch size.
struct GroupingWeights {
  double w_time = 1.0;
  double w_count = 1.0;
};

/// Strictly sequential batches; migrations within a batch run in parallel
/// with fixed bandwidths and paths.
struct Schedule {
  struct Item {
    std::string id;
    double bandwidth_Bps = 0;
    std::vector<PathFlow> paths;
  };
  struct Batch {
    std::vector<Item> items;
  };
  std::vector<Batch> batches;
};

/// One migration at a time, ordered by request id; each gets its full
/// multipath max-flow bandwidth.
Schedule plan_one_by_one(const NetworkTopology& topology,
                         std::span<const MigrationRequest> requests);

/// Conflict-group planner: migrations whose designated shortest paths share
/// a capacity group conflict and land in different groups (greedy coloring,
/// largest degree first); groups become batches ordered by ascending cost.
Schedule plan_grouping(const NetworkTopology& topology,
                       std::span<const MigrationRequest> requests,
                       const GroupingWeights& weights = {});

/// Explicitly ordered batches. Within a batch, members are routed in listed
/// order on the residual capacities left by earlier members (unit-weight
/// shortest path, full bottleneck bandwidth).
Schedule plan_forced(const NetworkTopology& topology,
                     std::span<const MigrationRequest> requests,
                     const std::vector<std::vector<std::string>>& batches);

}  // namespace migplan
