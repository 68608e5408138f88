#include "migplan/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "migplan/errors.hpp"
#include "migplan/rng.hpp"

namespace migplan {

namespace {

using json = nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

int find_index(const std::vector<std::string>& ids, const std::string& id) {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == id) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

int NetworkTopology::add_node(const std::string& id) {
  if (id.empty()) throw ValidationError("empty node id");
  if (has_node(id)) throw ValidationError("duplicate node id: " + id);
  nodes_.push_back(id);
  out_.emplace_back();
  in_.emplace_back();
  return node_count() - 1;
}

bool NetworkTopology::has_node(const std::string& id) const {
  return find_index(nodes_, id) >= 0;
}

int NetworkTopology::node_index(const std::string& id) const {
  const int i = find_index(nodes_, id);
  if (i < 0) throw ValidationError("unknown node id: " + id);
  return i;
}

int NetworkTopology::add_link(const std::string& id, const std::string& src,
                              const std::string& dst, double capacity_Bps) {
  if (src == dst) throw ValidationError("self-loop link: " + id);
  if (!(capacity_Bps > 0) || !std::isfinite(capacity_Bps)) {
    throw ValidationError("nonpositive capacity on link: " + id);
  }
  for (const Link& l : links_) {
    if (l.id == id) throw ValidationError("duplicate link id: " + id);
  }
  Link link;
  link.id = id;
  link.src = node_index(src);
  link.dst = node_index(dst);
  link.group = group_count();
  group_caps_.push_back(capacity_Bps);
  group_links_.push_back({link_count()});
  out_[link.src].push_back(link_count());
  in_[link.dst].push_back(link_count());
  links_.push_back(std::move(link));
  return link_count() - 1;
}

std::pair<int, int> NetworkTopology::add_bidirectional_link(
    const std::string& id, const std::string& a, const std::string& b,
    double capacity_Bps, bool shared_capacity) {
  const int fwd = add_link(id, a, b, capacity_Bps);
  const int rev = add_link(id + "~rev", b, a, capacity_Bps);
  if (shared_capacity) {
    // Merge the reverse direction into the forward link's group.
    const int dead = links_[rev].group;
    links_[rev].group = links_[fwd].group;
    group_links_[links_[fwd].group].push_back(rev);
    group_caps_.erase(group_caps_.begin() + dead);
    group_links_.erase(group_links_.begin() + dead);
    for (Link& l : links_) {
      if (l.group > dead) --l.group;
    }
  }
  return {fwd, rev};
}

void NetworkTopology::set_group_capacity(int g, double capacity_Bps) {
  if (!(capacity_Bps > 0) || !std::isfinite(capacity_Bps)) {
    throw ValidationError("nonpositive group capacity");
  }
  group_caps_[g] = capacity_Bps;
}

NetworkTopology NetworkTopology::without_links(
    const std::vector<bool>& remove, std::vector<int>* old_to_new) const {
  NetworkTopology result;
  result.nodes_ = nodes_;
  result.out_.resize(nodes_.size());
  result.in_.resize(nodes_.size());
  std::vector<int> group_map(group_count(), -1);
  std::vector<int> link_map(link_count(), -1);
  for (int e = 0; e < link_count(); ++e) {
    if (remove[e]) continue;
    const Link& l = links_[e];
    int g = group_map[l.group];
    if (g < 0) {
      g = result.group_count();
      group_map[l.group] = g;
      result.group_caps_.push_back(group_caps_[l.group]);
      result.group_links_.push_back({});
    }
    Link copy = l;
    copy.group = g;
    link_map[e] = result.link_count();
    result.group_links_[g].push_back(result.link_count());
    result.out_[copy.src].push_back(result.link_count());
    result.in_[copy.dst].push_back(result.link_count());
    result.links_.push_back(std::move(copy));
  }
  if (old_to_new) *old_to_new = std::move(link_map);
  return result;
}

std::vector<std::string> NetworkTopology::path_nodes(const Path& path) const {
  std::vector<std::string> nodes;
  if (path.empty()) return nodes;
  nodes.push_back(node_id(links_[path.links.front()].src));
  int cur = links_[path.links.front()].src;
  for (int e : path.links) {
    if (links_[e].src != cur) throw ValidationError("disconnected path");
    cur = links_[e].dst;
    nodes.push_back(node_id(cur));
  }
  return nodes;
}

double NetworkTopology::path_bottleneck(const Path& path) const {
  double c = kInf;
  for (int e : path.links) c = std::min(c, link_capacity(e));
  return c;
}

namespace {

double parse_capacity(const json& link, const char* bits_key,
                      const char* bytes_key, const std::string& what) {
  const bool has_bits = link.contains(bits_key);
  const bool has_bytes = link.contains(bytes_key);
  if (has_bits == has_bytes) {
    throw ParseError(what + ": exactly one of " + bits_key + " (bits/s) or " +
                     bytes_key + " (bytes/s) required");
  }
  double v = 0;
  try {
    v = has_bits ? link.at(bits_key).get<double>() / 8.0
                 : link.at(bytes_key).get<double>();
  } catch (const json::exception& e) {
    throw ParseError(what + ": " + e.what());
  }
  if (!std::isfinite(v) || v < 0) {
    throw ValidationError(what + ": capacity must be finite and >= 0");
  }
  return v;
}

}  // namespace

NetworkTopology load_topology(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("topology document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("links")) {
    throw ParseError("topology document: expected {nodes, links}");
  }

  NetworkTopology topo;
  for (const auto& n : doc.at("nodes")) {
    if (!n.is_string()) throw ParseError("topology nodes must be strings");
    topo.add_node(n.get<std::string>());
  }
  for (const auto& l : doc.at("links")) {
    if (!l.is_object() || !l.contains("id") || !l.contains("src") ||
        !l.contains("dst")) {
      throw ParseError("link entry: expected {id, src, dst, capacity}");
    }
    const auto id = l.at("id").get<std::string>();
    const auto src = l.at("src").get<std::string>();
    const auto dst = l.at("dst").get<std::string>();
    if (!topo.has_node(src)) throw ValidationError("link " + id + ": unknown src " + src);
    if (!topo.has_node(dst)) throw ValidationError("link " + id + ": unknown dst " + dst);
    const double cap = parse_capacity(l, "capacity_bps", "capacity_Bps", "link " + id);
    if (cap == 0) continue;  // zero-capacity links are dropped on load
    const bool bidir = l.value("bidirectional", false);
    const bool shared = l.value("shared_capacity", false);
    if (shared && !bidir) {
      throw ValidationError("link " + id + ": shared_capacity requires bidirectional");
    }
    if (bidir) {
      topo.add_bidirectional_link(id, src, dst, cap, shared);
    } else {
      topo.add_link(id, src, dst, cap);
    }
  }
  return topo;
}

NetworkTopology load_topology_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open topology file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_topology(buf.str());
}

NetworkTopology builtin_b4() {
  // 12 sites, 19 cables. Reconstructed from the published drawing by node
  // degrees; 1 GBps in each direction, directions independent.
  static const int kEdges[19][2] = {
      {1, 2},  {1, 3},  {2, 3},  {2, 4},   {3, 5},   {4, 5},  {4, 6},
      {5, 6},  {6, 7},  {6, 8},  {7, 8},   {7, 9},   {8, 9},  {8, 10},
      {9, 10}, {9, 11}, {10, 11}, {10, 12}, {11, 12}};
  NetworkTopology topo;
  auto name = [](int i) {
    return "dc" + std::string(i < 10 ? "0" : "") + std::to_string(i);
  };
  for (int i = 1; i <= 12; ++i) topo.add_node(name(i));
  for (const auto& e : kEdges) {
    topo.add_bidirectional_link(name(e[0]) + "-" + name(e[1]), name(e[0]),
                                name(e[1]), 1e9, /*shared_capacity=*/false);
  }
  return topo;
}

NetworkTopology builtin_fattree(int pods, double cap_min_Bps,
                                double cap_max_Bps, std::uint64_t seed) {
  if (pods < 2 || pods % 2 != 0) {
    throw ValidationError("fat tree pod count must be even and >= 2");
  }
  if (!(cap_min_Bps > 0) || cap_max_Bps < cap_min_Bps) {
    throw ValidationError("fat tree capacity range invalid");
  }
  const int half = pods / 2;
  NetworkTopology topo;
  Rng rng(seed);
  auto draw = [&] {
    return cap_min_Bps == cap_max_Bps ? cap_min_Bps
                                      : rng.uniform(cap_min_Bps, cap_max_Bps);
  };

  // Names sort host < aggregation < core < edge within a pod prefix; that is
  // harmless, only determinism matters.
  std::vector<std::vector<std::string>> core(half,
                                             std::vector<std::string>(half));
  for (int i = 0; i < half; ++i) {
    for (int j = 0; j < half; ++j) {
      core[i][j] = "c" + std::to_string(i) + "_" + std::to_string(j);
      topo.add_node(core[i][j]);
    }
  }
  for (int p = 0; p < pods; ++p) {
    const std::string pod = "p" + std::to_string(p);
    for (int a = 0; a < half; ++a) topo.add_node(pod + "_a" + std::to_string(a));
    for (int e = 0; e < half; ++e) topo.add_node(pod + "_e" + std::to_string(e));
    for (int e = 0; e < half; ++e) {
      for (int h = 0; h < half; ++h) {
        topo.add_node(pod + "_e" + std::to_string(e) + "_h" + std::to_string(h));
      }
    }
  }
  // host <-> edge
  for (int p = 0; p < pods; ++p) {
    const std::string pod = "p" + std::to_string(p);
    for (int e = 0; e < half; ++e) {
      const std::string edge = pod + "_e" + std::to_string(e);
      for (int h = 0; h < half; ++h) {
        const std::string host = edge + "_h" + std::to_string(h);
        topo.add_bidirectional_link(host + "|" + edge, host, edge, draw(),
                                    false);
      }
    }
  }
  // edge <-> aggregation (full bipartite within pod)
  for (int p = 0; p < pods; ++p) {
    const std::string pod = "p" + std::to_string(p);
    for (int e = 0; e < half; ++e) {
      for (int a = 0; a < half; ++a) {
        const std::string edge = pod + "_e" + std::to_string(e);
        const std::string agg = pod + "_a" + std::to_string(a);
        topo.add_bidirectional_link(edge + "|" + agg, edge, agg, draw(), false);
      }
    }
  }
  // aggregation <-> core: aggregation switch a of each pod connects to core
  // row a.
  for (int p = 0; p < pods; ++p) {
    const std::string pod = "p" + std::to_string(p);
    for (int a = 0; a < half; ++a) {
      const std::string agg = pod + "_a" + std::to_string(a);
      for (int j = 0; j < half; ++j) {
        topo.add_bidirectional_link(agg + "|" + core[a][j], agg, core[a][j],
                                    draw(), false);
      }
    }
  }
  return topo;
}

NetworkTopology star_expand(const HostCapacityModel& model) {
  if (model.send_cap.size() != model.recv_cap.size()) {
    throw ValidationError("host capacity model: send/recv size mismatch");
  }
  NetworkTopology topo;
  const int h = model.hosts();
  for (int i = 0; i < h; ++i) topo.add_node(HostCapacityModel::host_id(i));
  topo.add_node("core");
  for (int i = 0; i < h; ++i) {
    const std::string host = HostCapacityModel::host_id(i);
    topo.add_link(host + "-up", host, "core", model.send_cap[i]);
    topo.add_link(host + "-down", "core", host, model.recv_cap[i]);
  }
  return topo;
}

double path_weight(const Path& path, std::span<const double> link_weights) {
  double w = 0;
  for (int e : path.links) w += link_weights[e];
  return w;
}

namespace {

/// Dijkstra over reversed links: dist_to[v] = min weight of v -> dst.
std::vector<double> dijkstra_to(const NetworkTopology& topo,
                                std::span<const double> w, int dst) {
  std::vector<double> dist(topo.node_count(), kInf);
  dist[dst] = 0;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  heap.push({0, dst});
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    for (int e : topo.in_links(v)) {
      const int u = topo.link(e).src;
      const double nd = d + w[e];
      if (nd < dist[u]) {
        dist[u] = nd;
        heap.push({nd, u});
      }
    }
  }
  return dist;
}

}  // namespace

namespace {

/// Plain forward Dijkstra with predecessor tracking; deterministic, always
/// finds a path when one exists. Fallback for degenerate weight ranges where
/// the lexicographic walk cannot make progress.
Path dijkstra_path(const NetworkTopology& topo, std::span<const double> w,
                   int src, int dst) {
  std::vector<double> dist(topo.node_count(), kInf);
  std::vector<int> pred_link(topo.node_count(), -1);
  dist[src] = 0;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  heap.push({0, src});
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    for (int e : topo.out_links(v)) {
      const int u = topo.link(e).dst;
      const double nd = d + w[e];
      if (nd < dist[u]) {
        dist[u] = nd;
        pred_link[u] = e;
        heap.push({nd, u});
      }
    }
  }
  Path path;
  for (int v = dst; v != src; v = topo.link(pred_link[v]).src) {
    if (pred_link[v] < 0) throw SolveError("dijkstra fallback lost the route");
    path.links.push_back(pred_link[v]);
  }
  std::reverse(path.links.begin(), path.links.end());
  return path;
}

}  // namespace

std::optional<Path> shortest_path(const NetworkTopology& topo,
                                  std::span<const double> w, int src,
                                  int dst) {
  if (w.size() != static_cast<std::size_t>(topo.link_count())) {
    throw ValidationError("weight vector size mismatch");
  }
  for (double x : w) {
    if (!(x > 0)) throw ValidationError("link weights must be positive");
  }
  if (src == dst) return Path{};

  const std::vector<double> dist = dijkstra_to(topo, w, dst);
  if (!std::isfinite(dist[src])) return std::nullopt;

  // Walk from src picking the smallest-id next node that stays on a shortest
  // path; this realizes the lexicographically-least node sequence. A small
  // relative tolerance absorbs floating-point summation noise; the visited
  // set keeps the walk simple when tiny weights are absorbed into equal
  // distances.
  Path path;
  std::vector<bool> visited(topo.node_count(), false);
  visited[src] = true;
  int cur = src;
  while (cur != dst) {
    const double budget = dist[cur];
    int best_link = -1;
    const std::string* best_node = nullptr;
    for (int e : topo.out_links(cur)) {
      const Link& l = topo.link(e);
      if (visited[l.dst]) continue;
      const double via = w[e] + dist[l.dst];
      if (via > budget * (1 + 1e-12)) continue;
      const std::string& cand = topo.node_id(l.dst);
      if (best_link < 0 || cand < *best_node ||
          (cand == *best_node && e < best_link)) {
        best_link = e;
        best_node = &cand;
      }
    }
    if (best_link < 0) {
      // No tolerated arc to an unvisited node; take the smallest total
      // estimate instead, or give up on the lexicographic walk entirely.
      double best_via = kInf;
      for (int e : topo.out_links(cur)) {
        const Link& l = topo.link(e);
        if (visited[l.dst] || !std::isfinite(dist[l.dst])) continue;
        const double via = w[e] + dist[l.dst];
        const std::string& cand = topo.node_id(l.dst);
        if (best_link < 0 || via < best_via ||
            (via == best_via &&
             (cand < *best_node || (cand == *best_node && e < best_link)))) {
          best_link = e;
          best_via = via;
          best_node = &cand;
        }
      }
      if (best_link < 0) return dijkstra_path(topo, w, src, dst);
    }
    path.links.push_back(best_link);
    cur = topo.link(best_link).dst;
    visited[cur] = true;
  }
  return path;
}

std::optional<Path> shortest_path(const NetworkTopology& topo,
                                  std::span<const double> w,
                                  const std::string& src,
                                  const std::string& dst) {
  return shortest_path(topo, w, topo.node_index(src), topo.node_index(dst));
}

}  // namespace migplan
