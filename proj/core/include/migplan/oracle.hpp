#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "migplan/fpta.hpp"
#include "migplan/request.hpp"
#include "migplan/topology.hpp"

namespace migplan {

using Rational = boost::multiprecision::cpp_rational;

/// Hard size caps of the exact solvers; exceeding them throws SizeBoundError.
struct OracleCaps {
  int max_nodes = 10;
  int max_hops = 6;
  int max_commodities = 12;
};

/// All simple directed paths from src to dst with at most max_hops links,
/// in deterministic (lexicographic node sequence) order. src == dst yields a
/// single empty path.
std::vector<Path> enumerate_paths(const NetworkTopology& topology,
                                  const std::string& src,
                                  const std::string& dst, int max_hops,
                                  int max_nodes = OracleCaps{}.max_nodes);

/// Exact solution of a small bandwidth-allocation problem, in rational
/// arithmetic. For the LP, `value` is the maximum total bandwidth and
/// nonzero_count the number of nonzero bandwidths in the zero-maximal
/// optimum; for the MIP, `value` is the maximum net rate.
struct ExactSolution {
  Rational value;
  std::vector<Rational> bandwidth;  // per request
  std::vector<std::map<std::vector<int>, Rational>> path_flows;
  std::vector<bool> started;  // MIP start vector (LP: bandwidth > 0)
  int nonzero_count = 0;      // N* for the LP, number of starts for the MIP

  double value_d() const { return value.convert_to<double>(); }
};

/// Exact optimum of the path-form throughput LP over the enumerated path
/// polytope. Among optimal solutions, returns one minimizing the number of
/// migrations with nonzero bandwidth (ties toward lexicographically earliest
/// commodity subset).
ExactSolution solve_lp_exact(const NetworkTopology& topology,
                             std::span<const MigrationRequest> requests,
                             const OracleCaps& caps = {});

/// Exact optimum of the net-rate problem by enumerating all start vectors
/// and solving the restricted LP for each; ties broken toward fewer started
/// migrations.
ExactSolution solve_mip_exact(const NetworkTopology& topology,
                              std::span<const MigrationRequest> requests,
                              const OracleCaps& caps = {});

/// Exact replanning step honoring a committed plan (no started migration
/// stops; bandwidths never decrease). Returns the merged plan in doubles,
/// suitable as a drop-in for solve_incremental on oracle-sized instances.
PlanSolution solve_optimal_incremental(
    const NetworkTopology& topology,
    std::span<const MigrationRequest> requests, const CommittedPlan& committed,
    const OracleCaps& caps = {});

enum class BoundCheck { pass, fail, not_applicable };

/// Verification record for the approximation bounds on a full-bisection
/// (star) instance.
struct BoundReport {
  double U = 0;   // exact MIP net-rate optimum
  double V = 0;   // exact LP throughput optimum
  double W = 0;   // approximation throughput
  double F = 0;   // approximation net rate
  int n_star = 0; // nonzero count of the zero-maximal LP optimum
  double L0 = 0;  // minimum host capacity
  double R0 = 0;  // maximum dirty rate
  double eta = 0;
  double sigma = 0;  // 2 eta / (1 - 2 eta), meaningful when eta < 1/2
  double epsilon = 0;
  double theta = 0;
  BoundCheck throughput_bound = BoundCheck::not_applicable;    // W >= (1-2e) V
  BoundCheck relaxation_bound = BoundCheck::not_applicable;  // V - N* R0 >= (1-s) U
  BoundCheck net_rate_bound = BoundCheck::not_applicable;  // F >= (1-2e-s) U

  bool all_applicable_pass() const {
    return throughput_bound != BoundCheck::fail && relaxation_bound != BoundCheck::fail &&
           net_rate_bound != BoundCheck::fail;
  }
};

/// Computes the bound report on the star expansion of `model`. Requests must
/// reference the model's host ids. With eta >= 1/2 the sigma-based checks
/// are marked not applicable.
BoundReport bound_report(const HostCapacityModel& model,
                         std::span<const MigrationRequest> requests,
                         const SolverConfig& config,
                         const OracleCaps& caps = {});

}  // namespace migplan
