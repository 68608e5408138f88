#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "migplan/errors.hpp"
#include "migplan/scenario.hpp"

using namespace migplan;

namespace {

const char* kMinimal = R"({
  "topology": "b4",
  "planner": "fpta",
  "epsilon": 0.1,
  "v_thd_bytes": 1e8,
  "t_r_s": 0.02,
  "seed": 3,
  "requests": [
    {"id": "vm1", "src": "dc01", "dst": "dc05", "memory_bytes": 2e9, "dirty_rate_Bps": 1e8},
    {"id": "vm2", "src": "dc03", "dst": "dc09", "memory_bytes": 4e9, "dirty_rate_bps": 8e8, "arrival_s": 1.5}
  ]
})";

}  // namespace

TEST_CASE("load_scenario with explicit requests") {
  const ScenarioSpec sc = load_scenario(kMinimal);
  CHECK(sc.topology.node_count() == 12);
  CHECK(sc.planner == "fpta");
  CHECK(sc.solver.epsilon == 0.1);
  CHECK(sc.v_thd_bytes == 1e8);
  REQUIRE(sc.requests.size() == 2);
  CHECK(sc.requests[0].dirty_rate_Bps == doctest::Approx(1e8));
  CHECK(sc.requests[1].dirty_rate_Bps == doctest::Approx(1e8));  // bits form
  CHECK(sc.requests[1].arrival_s == 1.5);
}

TEST_CASE("load_scenario errors") {
  CHECK_THROWS_AS(load_scenario("{oops"), ParseError);
  CHECK_THROWS_AS(load_scenario(R"({"planner": "fpta"})"), ParseError);
  CHECK_THROWS_AS(load_scenario(R"({"topology": "b4", "planner": "bogus"})"),
                  ValidationError);
  // src == dst
  CHECK_THROWS_AS(load_scenario(R"({
    "topology": "b4",
    "requests": [{"id": "x", "src": "dc01", "dst": "dc01",
                  "memory_bytes": 1e9, "dirty_rate_Bps": 0}]
  })"),
                  ValidationError);
  // duplicate id
  CHECK_THROWS_AS(load_scenario(R"({
    "topology": "b4",
    "requests": [
      {"id": "x", "src": "dc01", "dst": "dc02", "memory_bytes": 1e9, "dirty_rate_Bps": 0},
      {"id": "x", "src": "dc02", "dst": "dc03", "memory_bytes": 1e9, "dirty_rate_Bps": 0}]
  })"),
                  ValidationError);
  // forced planner needs batches
  CHECK_THROWS_AS(load_scenario(R"({"topology": "b4", "planner": "forced"})"),
                  ValidationError);
}

TEST_CASE("generator instantiation is seeded and reproducible") {
  const char* doc = R"({
    "topology": "b4",
    "planner": "fpta",
    "generator": {"count": 10, "memory_min_bytes": 1e9, "memory_max_bytes": 1e10,
                  "dirty_rate_Bps": 1e8, "total_memory_bytes": 50e9},
    "seed": 11
  })";
  ScenarioSpec a = load_scenario(doc);
  REQUIRE(a.requests.size() == 10);
  double sum = 0;
  for (const auto& r : a.requests) sum += r.memory_bytes;
  CHECK(sum == doctest::Approx(50e9).epsilon(1e-9));

  ScenarioSpec b = load_scenario(doc);
  for (std::size_t i = 0; i < a.requests.size(); ++i) {
    CHECK(a.requests[i].src == b.requests[i].src);
    CHECK(a.requests[i].dst == b.requests[i].dst);
    CHECK(a.requests[i].memory_bytes == b.requests[i].memory_bytes);
  }

  b.instantiate(12);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.requests.size(); ++i) {
    if (a.requests[i].src != b.requests[i].src ||
        a.requests[i].memory_bytes != b.requests[i].memory_bytes) {
      any_diff = true;
    }
  }
  CHECK(any_diff);
}

TEST_CASE("capacity reductions model background traffic") {
  const char* doc = R"({
    "topology": "b4",
    "capacity_reductions": [{"link": "dc01-dc02", "amount_Bps": 4e8}],
    "requests": []
  })";
  const ScenarioSpec sc = load_scenario(doc);
  bool found = false;
  for (int e = 0; e < sc.topology.link_count(); ++e) {
    if (sc.topology.link(e).id == "dc01-dc02") {
      CHECK(sc.topology.link_capacity(e) == doctest::Approx(6e8));
      found = true;
    }
  }
  CHECK(found);

  CHECK_THROWS_AS(load_scenario(R"({
    "topology": "b4",
    "capacity_reductions": [{"link": "dc01-dc02", "amount_Bps": 2e9}]
  })"),
                  ValidationError);
}

TEST_CASE("builtin fat-tree topology reference") {
  const char* doc = R"({
    "topology": {"builtin": "fattree", "pods": 4, "cap_min_Bps": 1e9,
                 "cap_max_Bps": 1e10, "seed": 5},
    "requests": []
  })";
  const ScenarioSpec sc = load_scenario(doc);
  CHECK(sc.topology.node_count() == 36);
  CHECK(sc.topology.link_count() == 96);
}
