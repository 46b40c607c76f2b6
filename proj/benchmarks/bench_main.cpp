#include "examples.hpp"

#include "nullctl/cycles.hpp"
#include "nullctl/fluid.hpp"
#include "nullctl/harness.hpp"

#include <benchmark/benchmark.h>

using namespace nullctl;

static void BM_StaticLp(benchmark::State& state) {
  const auto spec = oracle::two_by_three();
  for (auto _ : state) benchmark::DoNotOptimize(solve_static_lp(spec));
}
BENCHMARK(BM_StaticLp);

static void BM_AssignmentMap(benchmark::State& state) {
  const auto spec = oracle::two_by_three();
  const auto fluid = solve_static_lp(spec);
  const AssignmentMap g(ActivityGraph(spec, fluid));
  const std::vector<std::int64_t> a{800, 400};
  const std::vector<std::int64_t> b{400, 500, 300};
  for (auto _ : state) benchmark::DoNotOptimize(g.solve(a, b));
}
BENCHMARK(BM_AssignmentMap);

static void BM_PreemptiveRun(benchmark::State& state) {
  const auto spec = oracle::controllable();
  const auto fluid = solve_static_lp(spec);
  const PolicyFactory factory(spec, fluid, PolicyChoice{});
  const auto inst = scale_instance(spec, fluid, state.range(0));
  std::uint64_t events = 0;
  std::uint64_t rep = 0;
  for (auto _ : state) {
    auto policy = factory.make(inst);
    Simulator sim(spec, inst, *policy, RngStreams(1, rep++, 2, 2));
    sim.run(1.0, [&](const Event&, const SystemState&) { ++events; });
  }
  state.counters["events/s"] = benchmark::Counter(double(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_PreemptiveRun)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
