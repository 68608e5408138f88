#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "migplan/maxflow.hpp"
#include "migplan/request.hpp"
#include "migplan/topology.hpp"

namespace migplan {

struct SolverConfig {
  /// Accuracy level of the flow approximation, in (0, 0.5).
  double epsilon = 0.1;
  /// Start filter margin: a migration is only started when its allocated
  /// bandwidth exceeds (1 + theta) times its dirty rate. 0 starts every
  /// migration with nonzero bandwidth.
  double theta = 0.1;
};

/// Instrumentation of one flow-approximation run.
struct FlowStats {
  int phases = 0;       // phases actually executed
  int phase_bound = 0;  // ceil(log_{1+eps}((1+eps)/delta))
  long long augmentations = 0;
  double delta = 0;  // initial dual length
  double scale = 0;  // final flow divisor log_{1+eps}((1+eps)/delta)
  /// Largest observed deviation of a bottleneck link's dual update factor
  /// from (1 + eps).
  double max_bottleneck_factor_error = 0;
  bool lengths_nondecreasing = true;
};

/// Per-commodity flow keyed by explicit path (link-index sequences).
struct CommodityFlow {
  std::map<std::vector<int>, double> by_path;

  double total() const {
    double s = 0;
    for (const auto& [p, f] : by_path) s += f;
    return s;
  }
};

struct McfResult {
  std::vector<CommodityFlow> flows;  // one per input pair
  double throughput_Bps = 0;
  FlowStats stats;
};

/// Maximum multicommodity flow approximation (primal-dual, phase schedule).
/// The scaled result is capacity-feasible; throughput is at least
/// (1 - 2 epsilon) of the fractional optimum. Unreachable pairs get zero
/// flow.
McfResult max_mcf(const NetworkTopology& topology,
                  std::span<const std::pair<int, int>> pairs,
                  const SolverConfig& config);
McfResult max_mcf(const NetworkTopology& topology,
                  std::span<const std::pair<std::string, std::string>> pairs,
                  const SolverConfig& config);

/// Planner output for a batch of migration requests.
struct PlanSolution {
  struct Entry {
    std::string id;
    bool started = false;
    double bandwidth_Bps = 0;
    std::vector<PathFlow> paths;
  };
  std::vector<Entry> migrations;  // aligned with the request order
  double throughput_Bps = 0;      // W: sum of bandwidths
  double net_rate_Bps = 0;        // F: sum of (bandwidth - dirty rate) over started
  FlowStats stats;

  const Entry* find(const std::string& id) const;
};

/// Started-and-running allocations that a replan must respect: a committed
/// migration keeps running and its bandwidth never decreases.
struct CommittedPlan {
  struct Entry {
    std::string id;
    double bandwidth_Bps = 0;
    std::vector<PathFlow> paths;
  };
  std::vector<Entry> entries;

  bool empty() const { return entries.empty(); }
};

/// One-shot plan: flow approximation plus start post-processing. Migrations
/// whose bandwidth would not exceed (1 + theta) times their dirty rate are
/// not started and their flow is released.
PlanSolution solve(const NetworkTopology& topology,
                   std::span<const MigrationRequest> requests,
                   const SolverConfig& config);

/// Replan honoring a committed plan: committed flows are subtracted from the
/// link capacities, the residual problem is solved over all requests, and the
/// committed flows are added back. Committed entries whose ids are absent
/// from `requests` only reserve capacity. Throws SolveError when the
/// committed plan does not fit the topology.
PlanSolution solve_incremental(const NetworkTopology& topology,
                               std::span<const MigrationRequest> requests,
                               const CommittedPlan& committed,
                               const SolverConfig& config);

/// Topology with committed flows subtracted; fully consumed links are
/// excluded. old_to_new maps original link indices to residual ones.
NetworkTopology residual_topology(const NetworkTopology& topology,
                                  const CommittedPlan& committed,
                                  std::vector<int>* old_to_new = nullptr);

}  // namespace migplan
