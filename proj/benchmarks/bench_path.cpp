#include <benchmark/benchmark.h>

#include "changeforge/genlasso.hpp"
#include "changeforge/image.hpp"
#include "changeforge/irfl.hpp"
#include "changeforge/models.hpp"
#include "changeforge/rng.hpp"

using namespace changeforge;

namespace {

Eigen::VectorXd steps(int n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Eigen::VectorXd y(n);
  for (int t = 0; t < n; ++t) y(t) = ((4 * t / n) % 2 ? 2.0 : 0.0) + rng.normal();
  return y;
}

}  // namespace

static void BM_FusedPath(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  auto y = steps(n, 1);
  auto D = first_difference_matrix(n);
  for (auto _ : state) benchmark::DoNotOptimize(solve_dual_path(y, D));
  state.SetComplexityN(n);
}
BENCHMARK(BM_FusedPath)->RangeMultiplier(2)->Range(100, 800)->Complexity()->Unit(benchmark::kMillisecond);

static void BM_TrendPath(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  auto y = steps(n, 2);
  auto D = second_difference_matrix(n);
  for (auto _ : state) benchmark::DoNotOptimize(solve_dual_path(y, D));
}
BENCHMARK(BM_TrendPath)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_IrflMeanShift(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  auto spec = build_model(ModelFamily::mean_shift, n);
  auto design = absorb_design(spec.X, spec.D);
  auto y = steps(n, 3);
  for (auto _ : state) benchmark::DoNotOptimize(run_irfl(y, design));
}
BENCHMARK(BM_IrflMeanShift)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_PhiGrid(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  auto spec = build_model(ModelFamily::mean_shift, n);
  auto y = steps(n, 4);
  std::vector<double> grid{0.0, 0.2, 0.4, 0.6, 0.8};
  for (auto _ : state) benchmark::DoNotOptimize(phi_grid_search(spec, y, grid));
}
BENCHMARK(BM_PhiGrid)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_TvAdmm(benchmark::State& state) {
  int side = static_cast<int>(state.range(0));
  SplitMix64 rng(5);
  GridImage img{Eigen::MatrixXd::Zero(side, side)};
  img.Y.rightCols(side / 2).setOnes();
  for (int i = 0; i < img.Y.size(); ++i) img.Y.data()[i] += 0.1 * rng.normal();
  auto y = vectorize_column_major(img);
  auto D = grid_difference_matrix(side, side);
  for (auto _ : state) benchmark::DoNotOptimize(tv_admm(y, D, 0.2));
}
BENCHMARK(BM_TvAdmm)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
