#include "migplan/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "migplan/errors.hpp"

namespace migplan {

namespace {

// ---------------------------------------------------------------------------
// Exact simplex for: max sum(x) s.t. (0/1 matrix) x <= b, x >= 0, b > 0.
// Bland's rule on a dense rational tableau; x = 0 is a feasible start, so no
// phase one is needed.
// ---------------------------------------------------------------------------

struct SimplexResult {
  Rational value;
  std::vector<Rational> x;
};

SimplexResult simplex_max_sum(const std::vector<std::vector<int>>& col_rows,
                              const std::vector<Rational>& b) {
  const int n = static_cast<int>(col_rows.size());
  const int m = static_cast<int>(b.size());
  const int cols = n + m;  // structural + slack

  std::vector<std::vector<Rational>> t(m, std::vector<Rational>(cols + 1));
  for (int j = 0; j < n; ++j) {
    for (int i : col_rows[j]) t[i][j] = 1;
  }
  for (int i = 0; i < m; ++i) {
    t[i][n + i] = 1;
    t[i][cols] = b[i];
  }
  // Reduced-cost row for max sum(x): z[j] = -1 on structural columns.
  std::vector<Rational> z(cols + 1);
  for (int j = 0; j < n; ++j) z[j] = -1;

  std::vector<int> basis(m);
  std::iota(basis.begin(), basis.end(), n);

  while (true) {
    int enter = -1;
    for (int j = 0; j < cols; ++j) {
      if (z[j] < 0) {
        enter = j;
        break;  // Bland: smallest index
      }
    }
    if (enter < 0) break;

    int leave = -1;
    Rational best_ratio;
    for (int i = 0; i < m; ++i) {
      if (t[i][enter] > 0) {
        Rational ratio = t[i][cols] / t[i][enter];
        if (leave < 0 || ratio < best_ratio ||
            (ratio == best_ratio && basis[i] < basis[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
    }
    if (leave < 0) throw SolveError("exact LP unbounded");

    // Pivot on (leave, enter).
    const Rational pivot = t[leave][enter];
    for (int j = 0; j <= cols; ++j) t[leave][j] /= pivot;
    for (int i = 0; i < m; ++i) {
      if (i == leave || t[i][enter] == 0) continue;
      const Rational f = t[i][enter];
      for (int j = 0; j <= cols; ++j) t[i][j] -= f * t[leave][j];
    }
    if (z[enter] != 0) {
      const Rational f = z[enter];
      for (int j = 0; j <= cols; ++j) z[j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }

  SimplexResult result;
  result.x.assign(n, Rational(0));
  for (int i = 0; i < m; ++i) {
    if (basis[i] < n) result.x[basis[i]] = t[i][cols];
  }
  result.value = z[cols];
  return result;
}

// ---------------------------------------------------------------------------
// Problem assembly
// ---------------------------------------------------------------------------

struct PathUniverse {
  std::vector<std::vector<Path>> per_commodity;
  std::vector<std::vector<std::vector<int>>> groups_per_path;  // sorted
};

PathUniverse build_universe(const NetworkTopology& topo,
                            std::span<const MigrationRequest> requests,
                            const OracleCaps& caps) {
  if (topo.node_count() > caps.max_nodes) {
    throw SizeBoundError("oracle: topology exceeds node bound");
  }
  if (static_cast<int>(requests.size()) > caps.max_commodities) {
    throw SizeBoundError("oracle: too many commodities");
  }
  PathUniverse u;
  for (const auto& r : requests) {
    if (r.src == r.dst) {
      throw ValidationError("oracle: src == dst for request " + r.id);
    }
    u.per_commodity.push_back(
        enumerate_paths(topo, r.src, r.dst, caps.max_hops, caps.max_nodes));
    auto& groups = u.groups_per_path.emplace_back();
    for (const Path& p : u.per_commodity.back()) {
      std::vector<int> g;
      for (int e : p.links) g.push_back(topo.link(e).group);
      std::sort(g.begin(), g.end());
      g.erase(std::unique(g.begin(), g.end()), g.end());
      groups.push_back(std::move(g));
    }
  }
  return u;
}

std::vector<Rational> group_caps_rational(const NetworkTopology& topo) {
  std::vector<Rational> b;
  b.reserve(topo.group_count());
  for (int g = 0; g < topo.group_count(); ++g) {
    b.emplace_back(topo.group_capacity(g));
  }
  return b;
}

/// Restricted LP over the commodities selected by `mask`.
SimplexResult solve_subset(const PathUniverse& u,
                           const std::vector<Rational>& b,
                           std::uint32_t mask,
                           std::vector<std::pair<int, int>>* col_ids) {
  std::vector<std::vector<int>> cols;
  if (col_ids) col_ids->clear();
  for (std::size_t k = 0; k < u.per_commodity.size(); ++k) {
    if (!(mask & (1u << k))) continue;
    for (std::size_t p = 0; p < u.per_commodity[k].size(); ++p) {
      cols.push_back(u.groups_per_path[k][p]);
      if (col_ids) col_ids->emplace_back(static_cast<int>(k), static_cast<int>(p));
    }
  }
  return simplex_max_sum(cols, b);
}

std::vector<std::uint32_t> masks_by_popcount(int k) {
  std::vector<std::uint32_t> masks(1u << k);
  std::iota(masks.begin(), masks.end(), 0u);
  std::stable_sort(masks.begin(), masks.end(),
                   [](std::uint32_t a, std::uint32_t b) {
                     return std::popcount(a) < std::popcount(b);
                   });
  return masks;
}

ExactSolution from_subset_solution(const PathUniverse& u,
                                   std::span<const MigrationRequest> requests,
                                   const SimplexResult& lp,
                                   const std::vector<std::pair<int, int>>& col_ids) {
  ExactSolution sol;
  sol.bandwidth.assign(requests.size(), Rational(0));
  sol.path_flows.resize(requests.size());
  sol.started.assign(requests.size(), false);
  for (std::size_t c = 0; c < col_ids.size(); ++c) {
    if (lp.x[c] == 0) continue;
    const auto [k, p] = col_ids[c];
    sol.bandwidth[k] += lp.x[c];
    sol.path_flows[k][u.per_commodity[k][p].links] += lp.x[c];
  }
  return sol;
}

}  // namespace

std::vector<Path> enumerate_paths(const NetworkTopology& topo,
                                  const std::string& src,
                                  const std::string& dst, int max_hops,
                                  int max_nodes) {
  if (topo.node_count() > max_nodes) {
    throw SizeBoundError("enumerate_paths: topology exceeds node bound");
  }
  const int s = topo.node_index(src);
  const int d = topo.node_index(dst);
  std::vector<Path> result;
  if (s == d) {
    result.emplace_back();
    return result;
  }

  std::vector<bool> visited(topo.node_count(), false);
  std::vector<int> stack;
  visited[s] = true;

  // Out-links in (next node id, link index) order gives lexicographic output.
  auto ordered_out = [&](int v) {
    std::vector<int> out(topo.out_links(v).begin(), topo.out_links(v).end());
    std::sort(out.begin(), out.end(), [&](int a, int b) {
      const std::string& na = topo.node_id(topo.link(a).dst);
      const std::string& nb = topo.node_id(topo.link(b).dst);
      return na != nb ? na < nb : a < b;
    });
    return out;
  };

  auto dfs = [&](auto&& self, int v) -> void {
    if (static_cast<int>(stack.size()) >= max_hops) return;
    for (int e : ordered_out(v)) {
      const int next = topo.link(e).dst;
      if (visited[next]) continue;
      stack.push_back(e);
      if (next == d) {
        Path p;
        p.links = stack;
        result.push_back(std::move(p));
      } else {
        visited[next] = true;
        self(self, next);
        visited[next] = false;
      }
      stack.pop_back();
    }
  };
  dfs(dfs, s);
  return result;
}

ExactSolution solve_lp_exact(const NetworkTopology& topo,
                             std::span<const MigrationRequest> requests,
                             const OracleCaps& caps) {
  const PathUniverse u = build_universe(topo, requests, caps);
  const std::vector<Rational> b = group_caps_rational(topo);
  const int k = static_cast<int>(requests.size());

  std::vector<std::pair<int, int>> col_ids;
  const std::uint32_t full = k == 0 ? 0u : ((1u << k) - 1);
  const SimplexResult best = solve_subset(u, b, full, &col_ids);

  // Zero-maximal selection: smallest commodity subset that still attains the
  // optimum; its solution has every selected bandwidth nonzero.
  for (std::uint32_t mask : masks_by_popcount(k)) {
    std::vector<std::pair<int, int>> ids;
    const SimplexResult lp = solve_subset(u, b, mask, &ids);
    if (lp.value == best.value) {
      ExactSolution sol = from_subset_solution(u, requests, lp, ids);
      sol.value = best.value;
      for (std::size_t i = 0; i < requests.size(); ++i) {
        if (sol.bandwidth[i] != 0) {
          sol.started[i] = true;
          ++sol.nonzero_count;
        }
      }
      return sol;
    }
  }
  throw SolveError("zero-maximal selection failed");  // unreachable
}

ExactSolution solve_mip_exact(const NetworkTopology& topo,
                              std::span<const MigrationRequest> requests,
                              const OracleCaps& caps) {
  const PathUniverse u = build_universe(topo, requests, caps);
  const std::vector<Rational> b = group_caps_rational(topo);
  const int k = static_cast<int>(requests.size());

  std::vector<Rational> dirty;
  dirty.reserve(requests.size());
  for (const auto& r : requests) dirty.emplace_back(r.dirty_rate_Bps);

  Rational best_net = 0;  // the all-zero start vector
  std::uint32_t best_mask = 0;
  for (std::uint32_t mask : masks_by_popcount(k)) {
    if (mask == 0) continue;
    const SimplexResult lp = solve_subset(u, b, mask, nullptr);
    Rational net = lp.value;
    for (int i = 0; i < k; ++i) {
      if (mask & (1u << i)) net -= dirty[i];
    }
    if (net > best_net) {  // strict: ties keep the earlier, smaller mask
      best_net = net;
      best_mask = mask;
    }
  }

  std::vector<std::pair<int, int>> ids;
  const SimplexResult lp = solve_subset(u, b, best_mask, &ids);
  ExactSolution sol = from_subset_solution(u, requests, lp, ids);
  sol.value = best_net;
  for (int i = 0; i < k; ++i) {
    sol.started[i] = (best_mask & (1u << i)) != 0;
    if (sol.started[i]) ++sol.nonzero_count;
  }
  return sol;
}

PlanSolution solve_optimal_incremental(
    const NetworkTopology& topo, std::span<const MigrationRequest> requests,
    const CommittedPlan& committed, const OracleCaps& caps) {
  std::vector<int> old_to_new;
  const NetworkTopology residual =
      committed.empty() ? topo : residual_topology(topo, committed, &old_to_new);
  if (committed.empty()) {
    old_to_new.resize(topo.link_count());
    std::iota(old_to_new.begin(), old_to_new.end(), 0);
  }
  std::vector<int> new_to_old(residual.link_count(), -1);
  for (std::size_t e = 0; e < old_to_new.size(); ++e) {
    if (old_to_new[e] >= 0) new_to_old[old_to_new[e]] = static_cast<int>(e);
  }

  const PathUniverse u = build_universe(residual, requests, caps);
  const std::vector<Rational> b = group_caps_rational(residual);
  const int k = static_cast<int>(requests.size());

  std::uint32_t committed_mask = 0;
  std::vector<const CommittedPlan::Entry*> committed_of(requests.size(),
                                                        nullptr);
  for (int i = 0; i < k; ++i) {
    for (const auto& entry : committed.entries) {
      if (entry.id == requests[i].id) {
        committed_mask |= 1u << i;
        committed_of[i] = &entry;
      }
    }
  }

  // Net gain of a start vector: extra flow of every included commodity minus
  // the dirty rates of the newly started ones. Committed commodities are
  // always included.
  Rational best_net = 0;
  std::uint32_t best_mask = committed_mask;
  bool have_best = false;
  for (std::uint32_t mask : masks_by_popcount(k)) {
    if ((mask & committed_mask) != committed_mask) continue;
    const SimplexResult lp = solve_subset(u, b, mask, nullptr);
    Rational net = lp.value;
    for (int i = 0; i < k; ++i) {
      if ((mask & (1u << i)) && !(committed_mask & (1u << i))) {
        net -= Rational(requests[i].dirty_rate_Bps);
      }
    }
    if (!have_best || net > best_net) {
      best_net = net;
      best_mask = mask;
      have_best = true;
    }
  }

  std::vector<std::pair<int, int>> ids;
  const SimplexResult lp = solve_subset(u, b, best_mask, &ids);

  PlanSolution plan;
  plan.migrations.resize(requests.size());
  for (int i = 0; i < k; ++i) plan.migrations[i].id = requests[i].id;
  for (std::size_t c = 0; c < ids.size(); ++c) {
    if (lp.x[c] == 0) continue;
    const auto [kk, p] = ids[c];
    PlanSolution::Entry& entry = plan.migrations[kk];
    PathFlow pf;
    pf.path.links.reserve(u.per_commodity[kk][p].links.size());
    for (int e : u.per_commodity[kk][p].links) pf.path.links.push_back(new_to_old[e]);
    pf.flow_Bps = lp.x[c].convert_to<double>();
    entry.bandwidth_Bps += pf.flow_Bps;
    entry.paths.push_back(std::move(pf));
  }
  for (int i = 0; i < k; ++i) {
    PlanSolution::Entry& entry = plan.migrations[i];
    entry.started = (best_mask & (1u << i)) != 0 && entry.bandwidth_Bps > 0;
    if (committed_of[i]) {
      entry.started = true;
      entry.bandwidth_Bps += committed_of[i]->bandwidth_Bps;
      for (const PathFlow& pf : committed_of[i]->paths) {
        bool merged = false;
        for (PathFlow& mine : entry.paths) {
          if (mine.path == pf.path) {
            mine.flow_Bps += pf.flow_Bps;
            merged = true;
            break;
          }
        }
        if (!merged) entry.paths.push_back(pf);
      }
    }
    if (!entry.started) {
      entry.bandwidth_Bps = 0;
      entry.paths.clear();
    } else {
      plan.throughput_Bps += entry.bandwidth_Bps;
      plan.net_rate_Bps += entry.bandwidth_Bps - requests[i].dirty_rate_Bps;
    }
  }
  return plan;
}

BoundReport bound_report(const HostCapacityModel& model,
                         std::span<const MigrationRequest> requests,
                         const SolverConfig& config, const OracleCaps& caps) {
  const NetworkTopology star = star_expand(model);

  BoundReport report;
  report.epsilon = config.epsilon;
  report.theta = config.theta;

  Rational l0;
  bool first = true;
  for (double c : model.send_cap) {
    if (first || Rational(c) < l0) l0 = Rational(c);
    first = false;
  }
  for (double c : model.recv_cap) {
    if (Rational(c) < l0) l0 = Rational(c);
  }
  Rational r0 = 0;
  for (const auto& r : requests) {
    if (Rational(r.dirty_rate_Bps) > r0) r0 = Rational(r.dirty_rate_Bps);
  }
  report.L0 = l0.convert_to<double>();
  report.R0 = r0.convert_to<double>();
  const Rational eta = l0 > 0 ? Rational(r0 / l0) : Rational(0);
  report.eta = eta.convert_to<double>();

  const ExactSolution lp = solve_lp_exact(star, requests, caps);
  const ExactSolution mip = solve_mip_exact(star, requests, caps);
  report.V = lp.value_d();
  report.U = mip.value_d();
  report.n_star = lp.nonzero_count;

  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& r : requests) pairs.emplace_back(r.src, r.dst);
  const McfResult mcf = max_mcf(star, pairs, config);
  report.W = mcf.throughput_Bps;
  const PlanSolution plan = solve(star, requests, config);
  report.F = plan.net_rate_Bps;

  // Throughput floor: W >= (1 - 2 eps) V. W is a double, so allow rounding slack.
  {
    const double rhs = (1 - 2 * config.epsilon) * report.V;
    const double slack = 1e-9 * std::max(1.0, std::abs(rhs));
    report.throughput_bound = report.W >= rhs - slack ? BoundCheck::pass : BoundCheck::fail;
  }
  const bool sigma_ok = eta < Rational(1, 2);
  if (sigma_ok) {
    const Rational sigma = 2 * eta / (1 - 2 * eta);
    report.sigma = sigma.convert_to<double>();
    // V - N* R0 >= (1 - sigma) U, all exact.
    const Rational lhs = lp.value - lp.nonzero_count * r0;
    const Rational rhs = (1 - sigma) * mip.value;
    report.relaxation_bound = lhs >= rhs ? BoundCheck::pass : BoundCheck::fail;
    // F >= (1 - 2 eps - sigma) U; F is a double, allow rounding slack.
    const double rhs2 =
        (1 - 2 * config.epsilon - report.sigma) * report.U;
    const double slack = 1e-9 * std::max(1.0, std::abs(rhs2));
    report.net_rate_bound =
        report.F >= rhs2 - slack ? BoundCheck::pass : BoundCheck::fail;
  } else {
    report.sigma = std::numeric_limits<double>::infinity();
    report.relaxation_bound = BoundCheck::not_applicable;
    report.net_rate_bound = BoundCheck::not_applicable;
  }
  return report;
}

}  // namespace migplan
