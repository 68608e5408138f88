#include "migplan/baselines.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

#include "migplan/errors.hpp"

namespace migplan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::size_t> order_by_id(std::span<const MigrationRequest> requests) {
  std::vector<std::size_t> order(requests.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return requests[a].id < requests[b].id;
  });
  return order;
}

}  // namespace

Schedule plan_one_by_one(const NetworkTopology& topo,
                         std::span<const MigrationRequest> requests) {
  Schedule schedule;
  for (std::size_t i : order_by_id(requests)) {
    const MigrationRequest& r = requests[i];
    MaxFlowResult mf = max_flow(topo, r.src, r.dst);
    if (mf.value_Bps <= 0) {
      throw SolveError("one-by-one: no route for migration " + r.id);
    }
    Schedule::Item item;
    item.id = r.id;
    for (const PathFlow& pf : mf.paths) item.bandwidth_Bps += pf.flow_Bps;
    item.paths = std::move(mf.paths);
    Schedule::Batch batch;
    batch.items.push_back(std::move(item));
    schedule.batches.push_back(std::move(batch));
  }
  return schedule;
}

Schedule plan_grouping(const NetworkTopology& topo,
                       std::span<const MigrationRequest> requests,
                       const GroupingWeights& weights) {
  if (weights.w_time == 0 && weights.w_count == 0) {
    throw ValidationError("grouping weights must not both be zero");
  }
  const std::size_t k = requests.size();
  const std::vector<double> unit(topo.link_count(), 1.0);

  // Designated route: unit-weight shortest path.
  std::vector<Path> designated(k);
  std::vector<std::set<int>> used_groups(k);
  for (std::size_t i = 0; i < k; ++i) {
    auto p = shortest_path(topo, unit, requests[i].src, requests[i].dst);
    if (!p || p->empty()) {
      throw SolveError("grouping: no route for migration " + requests[i].id);
    }
    designated[i] = std::move(*p);
    for (int e : designated[i].links) {
      used_groups[i].insert(topo.link(e).group);
    }
  }

  // Conflict graph: an edge whenever two designated paths contend for a
  // capacity group.
  std::vector<std::vector<bool>> conflict(k, std::vector<bool>(k, false));
  std::vector<int> degree(k, 0);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      bool shares = false;
      for (int g : used_groups[a]) {
        if (used_groups[b].count(g)) {
          shares = true;
          break;
        }
      }
      if (shares) {
        conflict[a][b] = conflict[b][a] = true;
        ++degree[a];
        ++degree[b];
      }
    }
  }

  // Greedy coloring, largest degree first, ties by request id.
  std::vector<std::size_t> order(k);
  for (std::size_t i = 0; i < k; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (degree[a] != degree[b]) return degree[a] > degree[b];
    return requests[a].id < requests[b].id;
  });
  std::vector<int> color(k, -1);
  int n_colors = 0;
  for (std::size_t i : order) {
    std::set<int> taken;
    for (std::size_t j = 0; j < k; ++j) {
      if (conflict[i][j] && color[j] >= 0) taken.insert(color[j]);
    }
    int c = 0;
    while (taken.count(c)) ++c;
    color[i] = c;
    n_colors = std::max(n_colors, c + 1);
  }

  // Color classes are link-disjoint, so every member gets its designated
  // path's bottleneck.
  struct Group {
    std::vector<std::size_t> members;
    double cost = 0;
    int color = 0;
  };
  std::vector<Group> groups(n_colors);
  for (int c = 0; c < n_colors; ++c) groups[c].color = c;
  for (std::size_t i : order_by_id(requests)) {
    groups[color[i]].members.push_back(i);
  }
  for (Group& g : groups) {
    double time = 0;
    for (std::size_t i : g.members) {
      const double l = topo.path_bottleneck(designated[i]);
      const double net = l - requests[i].dirty_rate_Bps;
      time = std::max(time, net > 0 ? requests[i].memory_bytes / net : kInf);
    }
    g.cost = weights.w_time * time +
             weights.w_count * static_cast<double>(g.members.size());
  }
  std::stable_sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    return a.color < b.color;
  });

  Schedule schedule;
  for (const Group& g : groups) {
    if (g.members.empty()) continue;
    Schedule::Batch batch;
    for (std::size_t i : g.members) {
      Schedule::Item item;
      item.id = requests[i].id;
      item.bandwidth_Bps = topo.path_bottleneck(designated[i]);
      item.paths.push_back({designated[i], item.bandwidth_Bps});
      batch.items.push_back(std::move(item));
    }
    schedule.batches.push_back(std::move(batch));
  }
  return schedule;
}

Schedule plan_forced(const NetworkTopology& topo,
                     std::span<const MigrationRequest> requests,
                     const std::vector<std::vector<std::string>>& batches) {
  // The batches must partition the request ids.
  std::map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < requests.size(); ++i) by_id[requests[i].id] = i;
  std::set<std::string> seen;
  std::size_t total = 0;
  for (const auto& batch : batches) {
    for (const auto& id : batch) {
      if (!by_id.count(id)) {
        throw ValidationError("forced batches reference unknown migration " + id);
      }
      if (!seen.insert(id).second) {
        throw ValidationError("forced batches repeat migration " + id);
      }
      ++total;
    }
  }
  if (total != requests.size()) {
    throw ValidationError("forced batches must cover every migration");
  }

  Schedule schedule;
  for (const auto& ids : batches) {
    if (ids.empty()) continue;
    Schedule::Batch batch;
    // Residual capacities within the batch.
    std::vector<double> residual(topo.group_count());
    for (int g = 0; g < topo.group_count(); ++g) residual[g] = topo.group_capacity(g);
    for (const auto& id : ids) {
      const MigrationRequest& r = requests[by_id[id]];
      // Shortest unit-weight path over links with residual capacity.
      std::vector<bool> remove(topo.link_count(), false);
      for (int e = 0; e < topo.link_count(); ++e) {
        if (residual[topo.link(e).group] <= 1e-9) remove[e] = true;
      }
      std::vector<int> old_to_new;
      NetworkTopology sub = topo.without_links(remove, &old_to_new);
      std::vector<int> new_to_old(sub.link_count());
      for (std::size_t e = 0; e < old_to_new.size(); ++e) {
        if (old_to_new[e] >= 0) new_to_old[old_to_new[e]] = static_cast<int>(e);
      }
      const std::vector<double> unit(sub.link_count(), 1.0);
      auto p = shortest_path(sub, unit, r.src, r.dst);
      if (!p || p->empty()) {
        throw SolveError("forced batch leaves no residual route for " + id);
      }
      double l = kInf;
      Path orig;
      for (int e : p->links) {
        orig.links.push_back(new_to_old[e]);
        l = std::min(l, residual[topo.link(new_to_old[e]).group]);
      }
      for (int e : orig.links) residual[topo.link(e).group] -= l;
      Schedule::Item item;
      item.id = id;
      item.bandwidth_Bps = l;
      item.paths.push_back({std::move(orig), l});
      batch.items.push_back(std::move(item));
    }
    schedule.batches.push_back(std::move(batch));
  }
  return schedule;
}

}  // namespace migplan
