#include <benchmark/benchmark.h>

#include "gossip_age/sim.hpp"

using namespace gossip_age;

namespace {

GossipNetwork torus(std::size_t side) {
  TopologySpec s;
  s.side = side;
  return build_network(s);
}

void BM_ProcessStep(benchmark::State& state) {
  const GossipNetwork net = torus(static_cast<std::size_t>(state.range(0)));
  VersionAgeProcess p(net, 1);
  for (auto _ : state) benchmark::DoNotOptimize(p.step());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ProcessStep)->Arg(10)->Arg(40)->Arg(100);

// Full replication including time-average bookkeeping; items are events.
void BM_SimulateTorus(benchmark::State& state) {
  const GossipNetwork net = torus(static_cast<std::size_t>(state.range(0)));
  SimConfig cfg;
  cfg.horizon = 200.0;
  cfg.threads = 1;
  std::uint64_t events = 0;
  for (auto _ : state) {
    const SimResult r = simulate(net, cfg);
    events += r.events.total();
    ++cfg.seed;
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(events));
}
BENCHMARK(BM_SimulateTorus)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

}  // namespace
