#include <benchmark/benchmark.h>

#include "changeforge/amoc.hpp"
#include "changeforge/exact.hpp"
#include "changeforge/heuristic.hpp"
#include "changeforge/rng.hpp"

using namespace changeforge;

namespace {

TimeSeries blocks(int n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<double> v(n);
  for (int t = 0; t < n; ++t) v[t] = ((t / 100) % 2 ? 2.0 : 0.0) + rng.normal();
  return TimeSeries(std::move(v));
}

}  // namespace

static void BM_Cusum(benchmark::State& state) {
  auto y = blocks(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(cusum_max_test(y));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Cusum)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

static void BM_Wbs(benchmark::State& state) {
  auto y = blocks(static_cast<int>(state.range(0)), 2);
  DetectionConfig cfg;
  cfg.intervals = 1000;
  for (auto _ : state) benchmark::DoNotOptimize(wild_binary_segmentation(y, cfg));
}
BENCHMARK(BM_Wbs)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

static void BM_Not(benchmark::State& state) {
  auto y = blocks(static_cast<int>(state.range(0)), 3);
  DetectionConfig cfg;
  cfg.intervals = 1000;
  for (auto _ : state) benchmark::DoNotOptimize(narrowest_over_threshold(y, cfg));
}
BENCHMARK(BM_Not)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

// OP is quadratic; PELT should scale close to linearly with changes spread out.
static void BM_OptimalPartition(benchmark::State& state) {
  auto y = blocks(static_cast<int>(state.range(0)), 4);
  PartitionOptions o;
  o.beta = 2 * std::log(static_cast<double>(y.n()));
  for (auto _ : state) benchmark::DoNotOptimize(optimal_partition(y, {}, o));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_OptimalPartition)->RangeMultiplier(2)->Range(500, 4000)->Complexity(benchmark::oNSquared)->Unit(benchmark::kMillisecond);

static void BM_Pelt(benchmark::State& state) {
  auto y = blocks(static_cast<int>(state.range(0)), 4);
  PartitionOptions o;
  o.beta = 2 * std::log(static_cast<double>(y.n()));
  for (auto _ : state) benchmark::DoNotOptimize(pelt(y, {}, o));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Pelt)->RangeMultiplier(2)->Range(500, 16000)->Complexity(benchmark::oN)->Unit(benchmark::kMillisecond);

static void BM_PrunedSn(benchmark::State& state) {
  auto y = blocks(static_cast<int>(state.range(0)), 5);
  for (auto _ : state) benchmark::DoNotOptimize(pruned_segment_neighbourhood(y, 8));
}
BENCHMARK(BM_PrunedSn)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_Cpop(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  SplitMix64 rng(6);
  std::vector<double> v(n);
  for (int t = 0; t < n; ++t) v[t] = std::abs(t - n / 2) * 0.05 + rng.normal();
  CpopOptions o;
  o.beta = 2 * std::log(static_cast<double>(n));
  TimeSeries y(std::move(v));
  for (auto _ : state) benchmark::DoNotOptimize(cpop(y, o));
}
BENCHMARK(BM_Cpop)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);
