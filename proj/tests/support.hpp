#pragma once

// Shared fixtures and instance generators for the test suites.

#include <algorithm>
#include <string>
#include <vector>

#include "migplan/fpta.hpp"
#include "migplan/request.hpp"
#include "migplan/rng.hpp"
#include "migplan/topology.hpp"

namespace migplan::test {

/// Two-switch, four-host fabric used in the worked examples: S1 reaches
/// H1..H3, S2 reaches H2..H4, every cable 100 MBps shared between its two
/// directions.
inline NetworkTopology two_switch_fabric() {
  NetworkTopology t;
  for (const char* n : {"H1", "H2", "H3", "H4", "S1", "S2"}) t.add_node(n);
  t.add_bidirectional_link("H1S1", "H1", "S1", 1e8, true);
  t.add_bidirectional_link("H2S1", "H2", "S1", 1e8, true);
  t.add_bidirectional_link("H3S1", "H3", "S1", 1e8, true);
  t.add_bidirectional_link("H2S2", "H2", "S2", 1e8, true);
  t.add_bidirectional_link("H3S2", "H3", "S2", 1e8, true);
  t.add_bidirectional_link("H4S2", "H4", "S2", 1e8, true);
  return t;
}

/// The three standard migrations on the fabric: 500 MB each, zero dirty rate
/// unless overridden.
inline std::vector<MigrationRequest> fabric_requests(double dirty = 0) {
  return {{"V1", "H1", "H2", 5e8, dirty, 0},
          {"V2", "H2", "H3", 5e8, dirty, 0},
          {"V4", "H3", "H4", 5e8, dirty, 0}};
}

/// Random connected digraph: spanning tree plus extra cables, capacities
/// uniform in [1e8, 1e9]; roughly half the instances use shared-capacity
/// cables.
inline NetworkTopology random_graph(Rng& rng, int nodes, bool shared_caps) {
  NetworkTopology t;
  for (int i = 0; i < nodes; ++i) t.add_node("n" + std::to_string(i));
  for (int i = 1; i < nodes; ++i) {
    const int j = static_cast<int>(rng.uniform_int(0, i - 1));
    t.add_bidirectional_link("t" + std::to_string(i), "n" + std::to_string(i),
                             "n" + std::to_string(j), rng.uniform(1e8, 1e9),
                             shared_caps);
  }
  const int extra = static_cast<int>(rng.uniform_int(0, nodes));
  for (int x = 0; x < extra; ++x) {
    const int a = static_cast<int>(rng.uniform_int(0, nodes - 1));
    int b = static_cast<int>(rng.uniform_int(0, nodes - 2));
    if (b >= a) ++b;
    try {
      t.add_bidirectional_link("x" + std::to_string(x),
                               "n" + std::to_string(a), "n" + std::to_string(b),
                               rng.uniform(1e8, 1e9), shared_caps);
    } catch (const std::exception&) {
      // duplicate cable id for this pair; skip
    }
  }
  return t;
}

inline std::vector<MigrationRequest> random_requests(Rng& rng,
                                                     const NetworkTopology& t,
                                                     int count,
                                                     double max_dirty) {
  std::vector<MigrationRequest> reqs;
  reqs.reserve(count);
  for (int i = 0; i < count; ++i) {
    MigrationRequest r;
    r.id = "vm" + std::string(i + 1 < 10 ? "0" : "") + std::to_string(i + 1);
    const int a = static_cast<int>(rng.uniform_int(0, t.node_count() - 1));
    int b = static_cast<int>(rng.uniform_int(0, t.node_count() - 2));
    if (b >= a) ++b;
    r.src = t.node_id(a);
    r.dst = t.node_id(b);
    r.memory_bytes = rng.uniform(1e9, 1e10);
    r.dirty_rate_Bps = max_dirty > 0 ? rng.uniform(0, max_dirty) : 0;
    reqs.push_back(std::move(r));
  }
  return reqs;
}

inline double min_group_capacity(const NetworkTopology& t) {
  double c = 1e300;
  for (int g = 0; g < t.group_count(); ++g) {
    c = std::min(c, t.group_capacity(g));
  }
  return c;
}

/// Largest relative excess of any capacity group under the plan's flows.
inline double max_overload(const NetworkTopology& t, const PlanSolution& plan) {
  std::vector<double> load(t.group_count(), 0);
  for (const auto& entry : plan.migrations) {
    for (const auto& pf : entry.paths) {
      for (int e : pf.path.links) load[t.link(e).group] += pf.flow_Bps;
    }
  }
  double worst = 0;
  for (int g = 0; g < t.group_count(); ++g) {
    const double cap = t.group_capacity(g);
    worst = std::max(worst, (load[g] - cap) / cap);
  }
  return worst;
}

inline double max_overload(const NetworkTopology& t, const McfResult& mcf) {
  std::vector<double> load(t.group_count(), 0);
  for (const auto& cf : mcf.flows) {
    for (const auto& [links, flow] : cf.by_path) {
      for (int e : links) load[t.link(e).group] += flow;
    }
  }
  double worst = 0;
  for (int g = 0; g < t.group_count(); ++g) {
    const double cap = t.group_capacity(g);
    worst = std::max(worst, (load[g] - cap) / cap);
  }
  return worst;
}

}  // namespace migplan::test
