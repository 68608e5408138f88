#include "migplan/fpta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "migplan/errors.hpp"

namespace migplan {

namespace {

void check_config(const SolverConfig& config) {
  if (!(config.epsilon > 0) || !(config.epsilon < 0.5)) {
    throw ValidationError("epsilon must be in (0, 0.5)");
  }
  if (config.theta < 0) throw ValidationError("theta must be nonnegative");
}

// Bandwidths below one byte/second are treated as zero.
constexpr double kZeroBandwidth = 1.0;

}  // namespace

const PlanSolution::Entry* PlanSolution::find(const std::string& id) const {
  for (const Entry& e : migrations) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

McfResult max_mcf(const NetworkTopology& topo,
                  std::span<const std::pair<int, int>> pairs,
                  const SolverConfig& config) {
  check_config(config);
  const double eps = config.epsilon;
  const int n_nodes = topo.node_count();
  const int n_links = topo.link_count();
  const int n_groups = topo.group_count();

  McfResult result;
  result.flows.resize(pairs.size());
  if (pairs.empty() || n_links == 0) return result;

  const double delta =
      (1 + eps) / std::pow((1 + eps) * n_nodes, 1.0 / eps);
  const double scale = std::log((1 + eps) / delta) / std::log1p(eps);
  const int phase_bound = static_cast<int>(std::ceil(scale));
  result.stats.delta = delta;
  result.stats.scale = scale;
  result.stats.phase_bound = phase_bound;

  std::vector<double> u(n_groups, delta);          // dual length per group
  std::vector<double> w(n_links);                  // per-link view of u
  for (int e = 0; e < n_links; ++e) w[e] = u[topo.link(e).group];

  std::vector<bool> unreachable(pairs.size(), false);
  for (std::size_t j = 0; j < pairs.size(); ++j) {
    if (pairs[j].first == pairs[j].second) unreachable[j] = true;
  }

  for (int r = 1; r <= phase_bound; ++r) {
    const double threshold =
        std::min(1.0, delta * std::pow(1 + eps, r));
    for (std::size_t j = 0; j < pairs.size(); ++j) {
      if (unreachable[j]) continue;
      while (true) {
        auto p = shortest_path(topo, w, pairs[j].first, pairs[j].second);
        if (!p) {
          unreachable[j] = true;
          break;
        }
        const double dist = path_weight(*p, w);
        if (!(dist < threshold)) break;

        double c = std::numeric_limits<double>::infinity();
        for (int e : p->links) c = std::min(c, topo.link_capacity(e));
        result.flows[j].by_path[p->links] += c;
        ++result.stats.augmentations;
        for (int e : p->links) {
          const int g = topo.link(e).group;
          const double cap = topo.group_capacity(g);
          const double factor = 1 + eps * c / cap;
          if (factor < 1) result.stats.lengths_nondecreasing = false;
          if (cap == c) {
            result.stats.max_bottleneck_factor_error =
                std::max(result.stats.max_bottleneck_factor_error,
                         std::abs(factor - (1 + eps)));
          }
          u[g] *= factor;
          for (int le : topo.group_links(g)) w[le] = u[g];
        }
      }
    }
    result.stats.phases = r;
    // Once the schedule reaches 1, every commodity's distance is at least 1
    // and later phases cannot augment.
    if (threshold >= 1.0) break;
  }

  for (auto& cf : result.flows) {
    for (auto& [path, flow] : cf.by_path) flow /= scale;
    result.throughput_Bps += cf.total();
  }
  return result;
}

McfResult max_mcf(const NetworkTopology& topo,
                  std::span<const std::pair<std::string, std::string>> pairs,
                  const SolverConfig& config) {
  std::vector<std::pair<int, int>> idx;
  idx.reserve(pairs.size());
  for (const auto& [s, d] : pairs) {
    idx.emplace_back(topo.node_index(s), topo.node_index(d));
  }
  return max_mcf(topo, idx, config);
}

namespace {

PlanSolution plan_from_mcf(McfResult&& mcf,
                           std::span<const MigrationRequest> requests,
                           const SolverConfig& config,
                           const std::vector<bool>& skip_filter) {
  PlanSolution plan;
  plan.stats = mcf.stats;
  plan.migrations.resize(requests.size());
  for (std::size_t k = 0; k < requests.size(); ++k) {
    PlanSolution::Entry& entry = plan.migrations[k];
    entry.id = requests[k].id;
    double l = mcf.flows[k].total();
    if (l < kZeroBandwidth) l = 0;
    // Start post-processing: nonzero bandwidth means started, except that a
    // migration which could not outrun its dirty rate is filtered and its
    // flow released.
    const bool started =
        l > 0 && (skip_filter[k] ||
                  l > (1 + config.theta) * requests[k].dirty_rate_Bps);
    if (!started) {
      entry.started = false;
      entry.bandwidth_Bps = 0;
      continue;
    }
    entry.started = true;
    entry.bandwidth_Bps = l;
    for (auto& [links, flow] : mcf.flows[k].by_path) {
      if (flow <= 0) continue;
      PathFlow pf;
      pf.path.links = links;
      pf.flow_Bps = flow;
      entry.paths.push_back(std::move(pf));
    }
    plan.throughput_Bps += l;
    plan.net_rate_Bps += l - requests[k].dirty_rate_Bps;
  }
  return plan;
}

}  // namespace

PlanSolution solve(const NetworkTopology& topo,
                   std::span<const MigrationRequest> requests,
                   const SolverConfig& config) {
  check_config(config);
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(requests.size());
  for (const auto& r : requests) {
    pairs.emplace_back(topo.node_index(r.src), topo.node_index(r.dst));
  }
  McfResult mcf = max_mcf(topo, pairs, config);
  return plan_from_mcf(std::move(mcf), requests, config,
                       std::vector<bool>(requests.size(), false));
}

NetworkTopology residual_topology(const NetworkTopology& topo,
                                  const CommittedPlan& committed,
                                  std::vector<int>* old_to_new) {
  std::vector<double> used(topo.group_count(), 0);
  for (const auto& entry : committed.entries) {
    for (const PathFlow& pf : entry.paths) {
      for (int e : pf.path.links) {
        used[topo.link(e).group] += pf.flow_Bps;
      }
    }
  }
  std::vector<bool> remove(topo.link_count(), false);
  std::vector<double> residual(topo.group_count(), 0);
  for (int g = 0; g < topo.group_count(); ++g) {
    const double cap = topo.group_capacity(g);
    if (used[g] > cap * (1 + 1e-9)) {
      throw SolveError("committed plan infeasible: group over capacity");
    }
    residual[g] = cap - used[g];
    if (residual[g] <= cap * 1e-12 || residual[g] < kZeroBandwidth * 1e-3) {
      for (int e : topo.group_links(g)) remove[e] = true;
    }
  }
  NetworkTopology out = topo.without_links(remove, old_to_new);
  // without_links preserves relative group order among survivors.
  std::vector<double> caps;
  for (int g = 0; g < topo.group_count(); ++g) {
    bool survives = false;
    for (int e : topo.group_links(g)) {
      if (!remove[e]) survives = true;
    }
    if (survives) caps.push_back(residual[g]);
  }
  for (std::size_t g = 0; g < caps.size(); ++g) {
    out.set_group_capacity(static_cast<int>(g), caps[g]);
  }
  return out;
}

PlanSolution solve_incremental(const NetworkTopology& topo,
                               std::span<const MigrationRequest> requests,
                               const CommittedPlan& committed,
                               const SolverConfig& config) {
  check_config(config);
  if (committed.empty()) return solve(topo, requests, config);

  std::vector<int> old_to_new;
  NetworkTopology residual = residual_topology(topo, committed, &old_to_new);

  std::vector<const CommittedPlan::Entry*> committed_of(requests.size(),
                                                        nullptr);
  std::vector<bool> skip_filter(requests.size(), false);
  for (std::size_t k = 0; k < requests.size(); ++k) {
    for (const auto& entry : committed.entries) {
      if (entry.id == requests[k].id) {
        committed_of[k] = &entry;
        skip_filter[k] = true;  // already running; never filtered
      }
    }
  }

  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(requests.size());
  for (const auto& r : requests) {
    pairs.emplace_back(residual.node_index(r.src), residual.node_index(r.dst));
  }
  McfResult mcf = max_mcf(residual, pairs, config);

  // Map path link indices back to the original topology.
  std::vector<int> new_to_old(residual.link_count(), -1);
  for (std::size_t e = 0; e < old_to_new.size(); ++e) {
    if (old_to_new[e] >= 0) new_to_old[old_to_new[e]] = static_cast<int>(e);
  }
  for (auto& cf : mcf.flows) {
    std::map<std::vector<int>, double> remapped;
    for (auto& [links, flow] : cf.by_path) {
      std::vector<int> orig(links.size());
      for (std::size_t i = 0; i < links.size(); ++i) orig[i] = new_to_old[links[i]];
      remapped[orig] += flow;
    }
    cf.by_path = std::move(remapped);
  }

  PlanSolution plan =
      plan_from_mcf(std::move(mcf), requests, config, skip_filter);

  // Add the committed allocations back.
  plan.throughput_Bps = 0;
  plan.net_rate_Bps = 0;
  for (std::size_t k = 0; k < requests.size(); ++k) {
    PlanSolution::Entry& entry = plan.migrations[k];
    if (committed_of[k]) {
      entry.started = true;
      entry.bandwidth_Bps += committed_of[k]->bandwidth_Bps;
      for (const PathFlow& pf : committed_of[k]->paths) {
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
    if (entry.started) {
      plan.throughput_Bps += entry.bandwidth_Bps;
      plan.net_rate_Bps += entry.bandwidth_Bps - requests[k].dirty_rate_Bps;
    }
  }
  return plan;
}

}  // namespace migplan
