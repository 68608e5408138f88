#pragma once

#include <span>
#include <string>
#include <vector>

#include "migplan/scenario.hpp"

namespace migplan {

enum class MigStatus { pending, migrating, stop_and_copy, done };

struct SimEvent {
  double t_s = 0;
  std::string kind;  // arrival | start | rate_change | precopy_end | done
  std::string id;
  double value = 0;  // bandwidth for start/rate_change events
};

/// Piecewise-constant total net transmission rate between two event times.
struct NetRateStep {
  double t0_s = 0;
  double t1_s = 0;
  double rate_Bps = 0;
};

struct VmOutcome {
  std::string id;
  double start_s = -1;
  double precopy_end_s = -1;
  double done_s = -1;
  double migration_time_s = 0;  // done - start
  double downtime_s = 0;        // v_thd / final bandwidth + t_r
  double final_bandwidth_Bps = 0;
};

struct SimulationResult {
  double makespan_s = 0;
  std::vector<VmOutcome> vms;  // aligned with the scenario request order
  std::vector<SimEvent> events;
  std::vector<NetRateStep> net_rate_curve;
  double net_rate_integral_bytes = 0;
  double plan_compute_s = 0;
  int replans = 0;
  /// Largest observed relative excess of a capacity group over its capacity
  /// across all instants (should stay within numerics).
  double max_group_overload_rel = 0;
  /// False if any running migration's bandwidth decreased across a replan.
  bool commitments_monotone = true;
  /// Counted only when SimOptions::check_work_conservation is set.
  int work_conservation_violations = 0;
};

struct SimOptions {
  /// After every replan, verify that any still-pending migration whose
  /// residual max flow exceeds (1 + theta) times its dirty rate has been
  /// started (meaningful for the fpta planner on uncontended instances).
  bool check_work_conservation = false;
};

/// Replays a migration batch under the scenario's planner. Replans happen at
/// events only (arrivals, pre-copy completions, stop-and-copy completions);
/// commitments are monotone per the replan contract. Throws SolveError when
/// no progress is possible while migrations remain.
SimulationResult run(const ScenarioSpec& scenario, const SimOptions& options = {});

/// Closed-form integral of a net-rate curve.
double net_rate_integral(std::span<const NetRateStep> curve);

struct CompareRow {
  std::string planner;
  std::uint64_t seed = 0;
  double makespan_s = 0;
  double mean_downtime_s = 0;
  double max_downtime_s = 0;
  double plan_compute_s = 0;
};

/// Runs every scenario under every planner; rows ordered scenario-major then
/// planner in the given order.
std::vector<CompareRow> compare(std::span<const ScenarioSpec> scenarios,
                                std::span<const std::string> planners);

}  // namespace migplan
