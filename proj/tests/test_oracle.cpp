#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "migplan/errors.hpp"
#include "migplan/oracle.hpp"
#include "support.hpp"

using namespace migplan;

TEST_CASE("enumerate_paths") {
  NetworkTopology t = test::two_switch_fabric();

  SUBCASE("both two-hop routes between H2 and H3") {
    const auto paths = enumerate_paths(t, "H2", "H3", 2);
    REQUIRE(paths.size() == 2);
    CHECK(t.path_nodes(paths[0]) == std::vector<std::string>{"H2", "S1", "H3"});
    CHECK(t.path_nodes(paths[1]) == std::vector<std::string>{"H2", "S2", "H3"});
  }
  SUBCASE("src == dst yields one empty path") {
    const auto paths = enumerate_paths(t, "H1", "H1", 4);
    REQUIRE(paths.size() == 1);
    CHECK(paths[0].empty());
  }
  SUBCASE("disconnected yields nothing") {
    NetworkTopology d;
    d.add_node("a");
    d.add_node("b");
    CHECK(enumerate_paths(d, "a", "b", 4).empty());
  }
  SUBCASE("size bound enforced") {
    NetworkTopology big = builtin_b4();
    CHECK_THROWS_AS(enumerate_paths(big, "dc01", "dc02", 3), SizeBoundError);
  }
  SUBCASE("hop bound respected") {
    const auto paths = enumerate_paths(t, "H1", "H2", 6);
    for (const auto& p : paths) CHECK(p.hops() <= 6);
    CHECK(paths.size() == 2);  // 2-hop via S1 and the 4-hop detour
  }
}

TEST_CASE("solve_lp_exact") {
  SUBCASE("single commodity over a single link") {
    NetworkTopology t;
    t.add_node("a");
    t.add_node("b");
    t.add_link("l", "a", "b", 42);
    std::vector<MigrationRequest> reqs = {{"m", "a", "b", 1, 0, 0}};
    const auto lp = solve_lp_exact(t, reqs);
    CHECK(lp.value == Rational(42));
    CHECK(lp.nonzero_count == 1);
  }

  SUBCASE("two commodities sharing one link: zero-maximal picks one") {
    NetworkTopology t;
    t.add_node("a");
    t.add_node("b");
    t.add_node("c");
    t.add_node("d");
    t.add_link("in1", "a", "c", 100);
    t.add_link("in2", "b", "c", 100);
    t.add_link("shared", "c", "d", 10);
    std::vector<MigrationRequest> reqs = {{"m1", "a", "d", 1, 0, 0},
                                          {"m2", "b", "d", 1, 0, 0}};
    const auto lp = solve_lp_exact(t, reqs);
    CHECK(lp.value == Rational(10));
    CHECK(lp.nonzero_count == 1);
    CHECK(((lp.bandwidth[0] == 10 && lp.bandwidth[1] == 0) ||
           (lp.bandwidth[0] == 0 && lp.bandwidth[1] == 10)));
  }

  SUBCASE("fabric optimum is 200 MBps with the single-commodity optimum") {
    // Upper bound certificate: the cables S1<->H2 and S2<->H3 together see
    // every unit of commodity flow at least once, capping the total at 200
    // MBps; V2 alone achieves it over its two routes.
    NetworkTopology t = test::two_switch_fabric();
    const auto lp = solve_lp_exact(t, test::fabric_requests());
    CHECK(lp.value == Rational(2e8));
    CHECK(lp.nonzero_count == 1);
    CHECK(lp.bandwidth[1] == Rational(2e8));  // V2 on both routes
  }

  SUBCASE("exact feasibility of the returned flows") {
    for (int seed = 0; seed < 10; ++seed) {
      Rng rng(800 + seed);
      NetworkTopology t = test::random_graph(rng, 6, seed % 2 == 0);
      const auto reqs = test::random_requests(rng, t, 3, 0);
      const auto lp = solve_lp_exact(t, reqs);
      std::vector<Rational> load(t.group_count(), Rational(0));
      Rational total = 0;
      for (std::size_t k = 0; k < reqs.size(); ++k) {
        Rational bw = 0;
        for (const auto& [links, flow] : lp.path_flows[k]) {
          for (int e : links) load[t.link(e).group] += flow;
          bw += flow;
        }
        CHECK(bw == lp.bandwidth[k]);
        total += bw;
      }
      CHECK(total == lp.value);
      for (int g = 0; g < t.group_count(); ++g) {
        CHECK(load[g] <= Rational(t.group_capacity(g)));
      }
    }
  }
}

TEST_CASE("solve_mip_exact") {
  SUBCASE("zero dirty rates make the MIP equal the LP") {
    for (int seed = 0; seed < 10; ++seed) {
      Rng rng(900 + seed);
      NetworkTopology t = test::random_graph(rng, 6, seed % 2 == 0);
      const auto reqs = test::random_requests(rng, t, 3, 0);
      CHECK(solve_mip_exact(t, reqs).value == solve_lp_exact(t, reqs).value);
    }
  }

  SUBCASE("net-negative migration is not started") {
    NetworkTopology t;
    t.add_node("a");
    t.add_node("b");
    t.add_link("l", "a", "b", 100);
    std::vector<MigrationRequest> reqs = {{"m", "a", "b", 1, 150, 0}};
    const auto mip = solve_mip_exact(t, reqs);
    CHECK(mip.value == 0);
    CHECK_FALSE(mip.started[0]);
  }

  SUBCASE("shared link with dirty rates starts exactly one") {
    NetworkTopology t;
    t.add_node("a");
    t.add_node("b");
    t.add_node("c");
    t.add_node("d");
    t.add_link("in1", "a", "c", 100);
    t.add_link("in2", "b", "c", 100);
    t.add_link("shared", "c", "d", 10);
    std::vector<MigrationRequest> reqs = {{"m1", "a", "d", 1, 1, 0},
                                          {"m2", "b", "d", 1, 1, 0}};
    const auto mip = solve_mip_exact(t, reqs);
    CHECK(mip.value == Rational(9));
    CHECK(mip.nonzero_count == 1);
  }

  SUBCASE("fabric with zero dirty rate: optimum 200 MBps, one start") {
    NetworkTopology t = test::two_switch_fabric();
    const auto mip = solve_mip_exact(t, test::fabric_requests());
    CHECK(mip.value == Rational(2e8));
    CHECK(mip.nonzero_count == 1);
    CHECK(mip.started[1]);  // ties break toward fewer started migrations
  }

  SUBCASE("commodity count bound enforced") {
    NetworkTopology t;
    t.add_node("a");
    t.add_node("b");
    t.add_link("l", "a", "b", 100);
    std::vector<MigrationRequest> reqs;
    for (int i = 0; i < 13; ++i) {
      reqs.push_back({"m" + std::to_string(i), "a", "b", 1, 0, 0});
    }
    CHECK_THROWS_AS(solve_mip_exact(t, reqs), SizeBoundError);
  }
}

TEST_CASE("bound_report on the worked single-request star") {
  HostCapacityModel model;
  model.send_cap = {100, 100};
  model.recv_cap = {100, 100};
  std::vector<MigrationRequest> reqs = {{"m", "h1", "h2", 1, 5, 0}};
  SolverConfig cfg;
  cfg.epsilon = 0.1;
  const BoundReport rep = bound_report(model, reqs, cfg);
  CHECK(rep.V == doctest::Approx(100));
  CHECK(rep.U == doctest::Approx(95));
  CHECK(rep.n_star == 1);
  CHECK(rep.eta == doctest::Approx(0.05));
  CHECK(rep.sigma == doctest::Approx(2.0 / 18.0));
  CHECK(rep.throughput_bound == BoundCheck::pass);
  CHECK(rep.relaxation_bound == BoundCheck::pass);  // 100 - 5 >= (1 - 1/9) * 95
  CHECK(rep.net_rate_bound == BoundCheck::pass);
}

TEST_CASE("bound_report limit case: zero dirty rates") {
  HostCapacityModel model;
  model.send_cap = {80, 90, 70};
  model.recv_cap = {60, 85, 75};
  std::vector<MigrationRequest> reqs = {{"m1", "h1", "h2", 1, 0, 0},
                                        {"m2", "h3", "h1", 1, 0, 0}};
  SolverConfig cfg;
  cfg.epsilon = 0.05;
  const BoundReport rep = bound_report(model, reqs, cfg);
  CHECK(rep.eta == 0);
  CHECK(rep.sigma == 0);
  CHECK(rep.U == doctest::Approx(rep.V));
  CHECK(rep.throughput_bound == BoundCheck::pass);
  CHECK(rep.relaxation_bound == BoundCheck::pass);
  CHECK(rep.net_rate_bound == BoundCheck::pass);
}

TEST_CASE("bound_report marks eta >= 1/2 not applicable") {
  HostCapacityModel model;
  model.send_cap = {100, 100};
  model.recv_cap = {100, 100};
  std::vector<MigrationRequest> reqs = {{"m", "h1", "h2", 1, 60, 0}};
  const BoundReport rep = bound_report(model, reqs, SolverConfig{});
  CHECK(rep.relaxation_bound == BoundCheck::not_applicable);
  CHECK(rep.net_rate_bound == BoundCheck::not_applicable);
  CHECK(rep.throughput_bound != BoundCheck::fail);
  CHECK(rep.all_applicable_pass());
}

TEST_CASE("bound_report property sweep on random stars") {
  int checked = 0;
  for (int seed = 0; seed < 60; ++seed) {
    Rng rng(2000 + seed);
    const int h = 2 + static_cast<int>(rng.uniform_int(0, 4));
    HostCapacityModel model;
    for (int i = 0; i < h; ++i) {
      model.send_cap.push_back(rng.uniform(1e8, 1e9));
      model.recv_cap.push_back(rng.uniform(1e8, 1e9));
    }
    double l0 = 1e300;
    for (double c : model.send_cap) l0 = std::min(l0, c);
    for (double c : model.recv_cap) l0 = std::min(l0, c);
    const int k = 1 + static_cast<int>(rng.uniform_int(0, 4));
    std::vector<MigrationRequest> reqs;
    for (int i = 0; i < k; ++i) {
      MigrationRequest r;
      r.id = "m" + std::to_string(i + 1);
      const int a = static_cast<int>(rng.uniform_int(0, h - 1));
      int b = static_cast<int>(rng.uniform_int(0, h - 2));
      if (b >= a) ++b;
      r.src = HostCapacityModel::host_id(a);
      r.dst = HostCapacityModel::host_id(b);
      r.memory_bytes = 1e9;
      r.dirty_rate_Bps = rng.uniform(0, 0.45 * l0);
      reqs.push_back(std::move(r));
    }
    SolverConfig cfg;
    cfg.epsilon = (seed % 2) ? 0.1 : 0.05;
    const BoundReport rep = bound_report(model, reqs, cfg);
    CHECK(rep.all_applicable_pass());
    CHECK(rep.U <= rep.V * (1 + 1e-12));
    if (rep.relaxation_bound == BoundCheck::pass) ++checked;
  }
  CHECK(checked > 20);
}
