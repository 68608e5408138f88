#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "migplan/fpta.hpp"
#include "migplan/request.hpp"
#include "migplan/topology.hpp"

namespace migplan {

/// Seeded request generator embedded in a scenario template: `count` random
/// src/dst pairs over `endpoints` (default: all nodes), memory sizes uniform
/// in [memory_min, memory_max] (optionally rescaled to sum to total_memory),
/// constant dirty rate, arrivals at 0.
struct RequestGenerator {
  int count = 0;
  double memory_min_bytes = 1e9;
  double memory_max_bytes = 1e10;
  double dirty_rate_Bps = 0;
  std::optional<double> total_memory_bytes;
  std::vector<std::string> endpoints;  // empty: all topology nodes
};

/// A runnable simulation input: topology, request batch, planner choice and
/// model/solver parameters.
struct ScenarioSpec {
  NetworkTopology topology;
  std::vector<MigrationRequest> requests;
  std::string planner = "fpta";
  SolverConfig solver;
  double v_thd_bytes = 0;
  double t_r_s = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::string>> forced_batches;  // planner "forced"
  std::optional<RequestGenerator> generator;

  /// Replaces `requests` with a fresh draw from `generator` (no-op without
  /// one). Used by multi-seed comparison runs.
  void instantiate(std::uint64_t seed_value);
};

extern const std::vector<std::string> kPlannerNames;
bool is_known_planner(const std::string& name);

/// Parses a scenario document. `base_dir` resolves relative topology paths.
ScenarioSpec load_scenario(const std::string& json_text,
                           const std::filesystem::path& base_dir = ".");
ScenarioSpec load_scenario_file(const std::filesystem::path& path);

/// Validates request fields against the topology (unique ids, known distinct
/// endpoints, positive memory). Throws ValidationError.
void validate_requests(const NetworkTopology& topology,
                       const std::vector<MigrationRequest>& requests);

}  // namespace migplan
