#include <benchmark/benchmark.h>

#include "migplan/fpta.hpp"
#include "migplan/migration_model.hpp"
#include "migplan/rng.hpp"
#include "migplan/simulator.hpp"

namespace {

using namespace migplan;

std::vector<MigrationRequest> backbone_requests(const NetworkTopology& t,
                                                int count) {
  Rng rng(42);
  std::vector<MigrationRequest> reqs;
  for (int i = 0; i < count; ++i) {
    MigrationRequest r;
    r.id = "vm" + std::to_string(i);
    const int a = static_cast<int>(rng.uniform_int(0, t.node_count() - 1));
    int b = static_cast<int>(rng.uniform_int(0, t.node_count() - 2));
    if (b >= a) ++b;
    r.src = t.node_id(a);
    r.dst = t.node_id(b);
    r.memory_bytes = rng.uniform(1e9, 1e10);
    r.dirty_rate_Bps = 1e8;
    reqs.push_back(std::move(r));
  }
  return reqs;
}

void BM_PlanBackbone(benchmark::State& state) {
  const NetworkTopology b4 = builtin_b4();
  const auto reqs = backbone_requests(b4, static_cast<int>(state.range(0)));
  SolverConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve(b4, reqs, cfg));
  }
}
BENCHMARK(BM_PlanBackbone)->Arg(25)->Arg(50)->Arg(100)->Arg(200)
    ->Unit(benchmark::kMillisecond);

void BM_PlanEpsilon(benchmark::State& state) {
  const NetworkTopology b4 = builtin_b4();
  const auto reqs = backbone_requests(b4, 50);
  SolverConfig cfg;
  cfg.epsilon = static_cast<double>(state.range(0)) / 100.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve(b4, reqs, cfg));
  }
}
BENCHMARK(BM_PlanEpsilon)->Arg(5)->Arg(10)->Arg(30)
    ->Unit(benchmark::kMillisecond);

void BM_SimulateBackbone(benchmark::State& state) {
  ScenarioSpec sc;
  sc.topology = builtin_b4();
  RequestGenerator gen;
  gen.count = static_cast<int>(state.range(0));
  gen.dirty_rate_Bps = 1e8;
  sc.generator = gen;
  sc.planner = "fpta";
  sc.v_thd_bytes = 1e8;
  sc.t_r_s = 0.02;
  sc.instantiate(7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run(sc));
  }
}
BENCHMARK(BM_SimulateBackbone)->Arg(20)->Arg(40)
    ->Unit(benchmark::kMillisecond);

void BM_PrecopyTime(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(precopy_time(1e10, 1e8, 1e9, 1e8));
  }
}
BENCHMARK(BM_PrecopyTime);

}  // namespace

BENCHMARK_MAIN();
