#include <benchmark/benchmark.h>

#include "gossip_age/bounds.hpp"
#include "gossip_age/isoperimetry.hpp"

using namespace gossip_age::bounds;

namespace {

void BM_ProfileSweep(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(min_boundary_profile(side));
}
BENCHMARK(BM_ProfileSweep)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_RootedSearch(benchmark::State& state) {
  const auto j = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(min_boundary_bruteforce(8, j));
}
BENCHMARK(BM_RootedSearch)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_FloorInequality(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(floor_inequality_check(n));
}
BENCHMARK(BM_FloorInequality)->Arg(10000)->Arg(1000000)->Unit(benchmark::kMillisecond);

}  // namespace
