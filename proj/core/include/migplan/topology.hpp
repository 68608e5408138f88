#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace migplan {

/// A directed network link. Capacity lives on the link's capacity group:
/// an independent link forms a singleton group, while the two directions of
/// a shared-capacity cable form one two-link group whose capacity is split
/// between the directions by the flows using them.
struct Link {
  std::string id;
  int src = -1;    // node index
  int dst = -1;    // node index
  int group = -1;  // capacity group index
};

/// Ordered sequence of link indices forming a simple directed path.
/// The empty path is the degenerate src==dst case.
struct Path {
  std::vector<int> links;

  bool empty() const { return links.empty(); }
  std::size_t hops() const { return links.size(); }

  bool operator==(const Path& other) const { return links == other.links; }
  bool operator<(const Path& other) const { return links < other.links; }
};

/// Directed capacitated graph with immutable-after-build semantics.
/// Capacities are bytes/second.
class NetworkTopology {
 public:
  int add_node(const std::string& id);

  /// Adds a directed link in its own capacity group. capacity_Bps must be > 0.
  int add_link(const std::string& id, const std::string& src,
               const std::string& dst, double capacity_Bps);

  /// Adds the two directed links of a cable. With shared_capacity the pair
  /// forms one capacity group; otherwise each direction is independent with
  /// the full capacity. The reverse link id is `id` + "~rev".
  std::pair<int, int> add_bidirectional_link(const std::string& id,
                                             const std::string& a,
                                             const std::string& b,
                                             double capacity_Bps,
                                             bool shared_capacity);

  int node_count() const { return static_cast<int>(nodes_.size()); }
  int link_count() const { return static_cast<int>(links_.size()); }
  int group_count() const { return static_cast<int>(group_caps_.size()); }

  bool has_node(const std::string& id) const;
  /// Throws ValidationError on unknown id.
  int node_index(const std::string& id) const;
  const std::string& node_id(int index) const { return nodes_[index]; }

  const Link& link(int index) const { return links_[index]; }
  const std::vector<Link>& links() const { return links_; }
  double link_capacity(int index) const {
    return group_caps_[links_[index].group];
  }
  double group_capacity(int g) const { return group_caps_[g]; }
  const std::vector<int>& group_links(int g) const { return group_links_[g]; }

  void set_group_capacity(int g, double capacity_Bps);

  /// Out-going link indices of a node, ascending link index. Adjacency is
  /// maintained eagerly, so a fully built topology is safe to share
  /// read-only across concurrent solver runs.
  std::span<const int> out_links(int node) const { return out_[node]; }
  /// In-coming link indices of a node, ascending link index.
  std::span<const int> in_links(int node) const { return in_[node]; }

  /// Copy with the given links removed and empty groups pruned.
  /// old_to_new maps previous link indices to new ones (-1 when removed).
  NetworkTopology without_links(const std::vector<bool>& remove,
                                std::vector<int>* old_to_new = nullptr) const;

  /// Node-id sequence of a path starting at `src_node`; validates adjacency.
  std::vector<std::string> path_nodes(const Path& path) const;
  double path_bottleneck(const Path& path) const;

 private:
  std::vector<std::string> nodes_;
  std::vector<Link> links_;
  std::vector<double> group_caps_;
  std::vector<std::vector<int>> group_links_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
};

/// Per-host capacity caps for a full-bisection network: send_cap[i] bounds
/// traffic leaving host i, recv_cap[i] bounds traffic entering host i.
struct HostCapacityModel {
  std::vector<double> send_cap;
  std::vector<double> recv_cap;

  int hosts() const { return static_cast<int>(send_cap.size()); }
  /// Host node id used by star_expand: "h1".."hH".
  static std::string host_id(int i) { return "h" + std::to_string(i + 1); }
};

/// Parses a topology document (JSON). Zero-capacity links are dropped;
/// negative capacities, duplicate ids, self-loops and dangling endpoints are
/// validation errors.
NetworkTopology load_topology(const std::string& json_text);
NetworkTopology load_topology_file(const std::filesystem::path& path);

/// 12-site WAN backbone with 19 cables, 1 GBps per direction (independent).
/// The edge list is a best-effort reconstruction of the published drawing.
NetworkTopology builtin_b4();

/// Standard 3-tier fat tree with `pods` pods (even, >= 2). Cable capacities
/// are drawn uniformly from [cap_min_Bps, cap_max_Bps] by the seeded
/// generator, both directions equal and independent.
NetworkTopology builtin_fattree(int pods, double cap_min_Bps,
                                double cap_max_Bps, std::uint64_t seed);

/// Star reduction of a full-bisection network: H hosts plus one core node,
/// host->core at send_cap, core->host at recv_cap.
NetworkTopology star_expand(const HostCapacityModel& model);

/// Minimum-weight simple path under positive per-link weights, or nullopt if
/// dst is unreachable. Ties are broken toward the lexicographically smallest
/// node-id sequence. src == dst yields the empty path.
std::optional<Path> shortest_path(const NetworkTopology& topology,
                                  std::span<const double> link_weights,
                                  const std::string& src,
                                  const std::string& dst);
std::optional<Path> shortest_path(const NetworkTopology& topology,
                                  std::span<const double> link_weights,
                                  int src, int dst);

double path_weight(const Path& path, std::span<const double> link_weights);

}  // namespace migplan
