#include "migplan/maxflow.hpp"

#include <algorithm>
#include <limits>
#include <queue>

#include "migplan/errors.hpp"

namespace migplan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Arc {
  int to;
  int rev;        // index of reverse arc in adj[to]
  double cap;     // residual capacity
  int link = -1;  // originating topology link, -1 for reverse arcs
};

struct Dinic {
  std::vector<std::vector<Arc>> adj;
  std::vector<int> level, iter;
  double scale = 1;

  explicit Dinic(int n) : adj(n), level(n), iter(n) {}

  void add_edge(int from, int to, double cap, int link) {
    adj[from].push_back({to, static_cast<int>(adj[to].size()), cap, link});
    adj[to].push_back({from, static_cast<int>(adj[from].size()) - 1, 0, -1});
  }

  bool bfs(int s, int t) {
    level.assign(adj.size(), -1);
    std::queue<int> q;
    level[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (const Arc& a : adj[v]) {
        if (a.cap > 1e-12 * scale && level[a.to] < 0) {
          level[a.to] = level[v] + 1;
          q.push(a.to);
        }
      }
    }
    return level[t] >= 0;
  }

  double dfs(int v, int t, double f) {
    if (v == t) return f;
    for (int& i = iter[v]; i < static_cast<int>(adj[v].size()); ++i) {
      Arc& a = adj[v][i];
      if (a.cap > 1e-12 * scale && level[v] < level[a.to]) {
        const double d = dfs(a.to, t, std::min(f, a.cap));
        if (d > 0) {
          a.cap -= d;
          adj[a.to][a.rev].cap += d;
          return d;
        }
      }
    }
    return 0;
  }

  double run(int s, int t) {
    double flow = 0;
    while (bfs(s, t)) {
      iter.assign(adj.size(), 0);
      while (true) {
        const double f = dfs(s, t, kInf);
        if (f <= 0) break;
        flow += f;
      }
    }
    return flow;
  }
};

}  // namespace

MaxFlowResult max_flow(const NetworkTopology& topo, int src, int dst) {
  MaxFlowResult result;
  if (src == dst) return result;

  Dinic dinic(topo.node_count());
  double max_cap = 0;
  for (int e = 0; e < topo.link_count(); ++e) max_cap = std::max(max_cap, topo.link_capacity(e));
  dinic.scale = std::max(1.0, max_cap);
  std::vector<int> arc_of_link(topo.link_count());
  for (int e = 0; e < topo.link_count(); ++e) {
    const Link& l = topo.link(e);
    arc_of_link[e] = static_cast<int>(dinic.adj[l.src].size());
    // Each direction gets the full group capacity; antiparallel use within a
    // shared group is cancelled below, which preserves the flow value.
    dinic.add_edge(l.src, l.dst, topo.link_capacity(e), e);
  }
  result.value_Bps = dinic.run(src, dst);
  if (result.value_Bps <= 0) {
    result.value_Bps = 0;
    return result;
  }

  // flow(e) = cap of the reverse arc.
  std::vector<double> flow(topo.link_count(), 0);
  for (int e = 0; e < topo.link_count(); ++e) {
    const Link& l = topo.link(e);
    const Arc& a = dinic.adj[l.src][arc_of_link[e]];
    flow[e] = dinic.adj[l.dst][a.rev].cap;
  }

  // Cancel antiparallel flow within each shared-capacity group so the group
  // constraint holds.
  for (int g = 0; g < topo.group_count(); ++g) {
    const auto& members = topo.group_links(g);
    if (members.size() != 2) continue;
    const double m = std::min(flow[members[0]], flow[members[1]]);
    if (m > 0) {
      flow[members[0]] -= m;
      flow[members[1]] -= m;
    }
  }

  // Path decomposition with cycle stripping.
  const double tiny = 1e-9 * dinic.scale;
  while (true) {
    // Greedy walk from src along positive-flow links.
    std::vector<int> walk_links;
    std::vector<int> pos_in_walk(topo.node_count(), -1);
    int cur = src;
    pos_in_walk[cur] = 0;
    bool reached = false;
    while (true) {
      int next_link = -1;
      for (int e : topo.out_links(cur)) {
        if (flow[e] > tiny) {
          next_link = e;
          break;
        }
      }
      if (next_link < 0) break;
      const int next = topo.link(next_link).dst;
      if (pos_in_walk[next] >= 0) {
        // Cycle: remove its bottleneck flow and restart the walk.
        const int start = pos_in_walk[next];
        double bottleneck = kInf;
        for (std::size_t i = start; i < walk_links.size(); ++i) {
          bottleneck = std::min(bottleneck, flow[walk_links[i]]);
        }
        bottleneck = std::min(bottleneck, flow[next_link]);
        for (std::size_t i = start; i < walk_links.size(); ++i) {
          flow[walk_links[i]] -= bottleneck;
        }
        flow[next_link] -= bottleneck;
        walk_links.clear();
        std::fill(pos_in_walk.begin(), pos_in_walk.end(), -1);
        cur = src;
        pos_in_walk[cur] = 0;
        continue;
      }
      walk_links.push_back(next_link);
      cur = next;
      pos_in_walk[cur] = static_cast<int>(walk_links.size());
      if (cur == dst) {
        reached = true;
        break;
      }
    }
    if (!reached) break;
    double bottleneck = kInf;
    for (int e : walk_links) bottleneck = std::min(bottleneck, flow[e]);
    for (int e : walk_links) flow[e] -= bottleneck;
    PathFlow pf;
    pf.path.links = walk_links;
    pf.flow_Bps = bottleneck;
    result.paths.push_back(std::move(pf));
  }
  return result;
}

MaxFlowResult max_flow(const NetworkTopology& topo, const std::string& src,
                       const std::string& dst) {
  return max_flow(topo, topo.node_index(src), topo.node_index(dst));
}

}  // namespace migplan
