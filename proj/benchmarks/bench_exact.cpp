#include <benchmark/benchmark.h>

#include "gossip_age/exact.hpp"

using namespace gossip_age;

namespace {

void BM_EnumerateTorus4(benchmark::State& state) {
  TopologySpec s;
  s.side = 4;
  const GossipNetwork net = build_network(s);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_connected_masks(net));
}
BENCHMARK(BM_EnumerateTorus4)->Unit(benchmark::kMillisecond);

void BM_SolveTorus4(benchmark::State& state) {
  TopologySpec s;
  s.side = 4;
  const GossipNetwork net = build_network(s);
  for (auto _ : state) benchmark::DoNotOptimize(solve_version_ages(net).singleton_mean());
}
BENCHMARK(BM_SolveTorus4)->Unit(benchmark::kMillisecond);

void BM_SolveComplete(benchmark::State& state) {
  TopologySpec s;
  s.kind = TopologyKind::complete;
  s.n = static_cast<std::size_t>(state.range(0));
  const GossipNetwork net = build_network(s);
  for (auto _ : state) benchmark::DoNotOptimize(solve_version_ages(net).singleton_mean());
}
BENCHMARK(BM_SolveComplete)->Arg(8)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_CompleteOracle(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(complete_graph_oracle(n, 1.0, 1.0));
}
BENCHMARK(BM_CompleteOracle)->Arg(1000)->Arg(1000000);

}  // namespace
