#include <benchmark/benchmark.h>

#include "mptsim/rng.hpp"
#include "mptsim/topology.hpp"

namespace {

using namespace mptsim;

// Reference parameters with the same mean child count at every level.
void BM_BuildTopology(benchmark::State& state) {
  TopologyParams params = reference_params();
  for (auto& level : params.levels) level.mean_children = static_cast<double>(state.range(0));
  std::uint64_t seed = 1;
  std::size_t nodes = 0;
  for (auto _ : state) {
    params.seed = seed++;
    const Topology t = build_topology(params);
    nodes = t.node_count();
    benchmark::DoNotOptimize(nodes);
  }
  state.counters["nodes"] = static_cast<double>(nodes);
}
BENCHMARK(BM_BuildTopology)->Arg(6)->Arg(10)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_TopologyStats(benchmark::State& state) {
  const Topology t = build_topology(reference_params());
  for (auto _ : state) benchmark::DoNotOptimize(topology_stats(t));
}
BENCHMARK(BM_TopologyStats)->Unit(benchmark::kMicrosecond);

void BM_Poisson(benchmark::State& state) {
  Rng rng(1, streams::kArrivals);
  const auto lambda = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(rng.poisson(lambda));
}
BENCHMARK(BM_Poisson)->Arg(5)->Arg(300);

}  // namespace
