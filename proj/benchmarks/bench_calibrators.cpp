#include <benchmark/benchmark.h>

#include <vector>

#include "causalcal/calibrators.hpp"
#include "causalcal/losses.hpp"
#include "causalcal/rng.hpp"
#include "causalcal/trees.hpp"

using namespace causalcal;

namespace {

std::vector<WeightedPoint> noisy_points(std::size_t n) {
  Rng rng(1);
  std::vector<WeightedPoint> pts(n);
  for (auto& p : pts) {
    p.pred = rng.uniform();
    p.target = p.pred + rng.normal();
  }
  return pts;
}

std::vector<LossPoint> pinball_points(std::size_t n) {
  Rng rng(2);
  std::vector<LossPoint> pts(n);
  for (auto& p : pts) {
    p.pred = rng.uniform(-1.0, 1.0);
    const double pi = rng.uniform(0.2, 0.8);
    const double a = rng.bernoulli(pi) ? 1.0 : 0.0;
    p.loss = corrected_pinball_qut(0.75, 1.0 / pi, rng.uniform(0.3, 0.9), a, 0.8 * p.pred + rng.normal());
  }
  return pts;
}

void BM_Pava(benchmark::State& state) {
  const auto pts = noisy_points(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(pava(pts));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Pava)->RangeMultiplier(4)->Range(256, 65536)->Complexity();

void BM_BucketMinimize(benchmark::State& state) {
  const auto pts = pinball_points(static_cast<std::size_t>(state.range(0)));
  std::vector<BoundLoss> losses;
  for (const auto& p : pts) losses.push_back(p.loss);
  for (auto _ : state) benchmark::DoNotOptimize(bucket_minimize(losses));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BucketMinimize)->RangeMultiplier(4)->Range(256, 65536)->Complexity();

void BM_ErmLinearPinball(benchmark::State& state) {
  const auto pts = pinball_points(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(erm_calibrate(pts, ErmClass{CalibratorClass::linear, 0}));
}
BENCHMARK(BM_ErmLinearPinball)->Arg(500)->Arg(2000);

void BM_ErmIsotonicPinball(benchmark::State& state) {
  const auto pts = pinball_points(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(erm_calibrate(pts, ErmClass{CalibratorClass::isotonic, 0}));
}
BENCHMARK(BM_ErmIsotonicPinball)->Arg(500)->Arg(2000);

void BM_BoostedTrees(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  FeatureMatrix x(n, 5);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < 5; ++j) x.at(i, j) = rng.uniform(-1.0, 1.0);
    y[i] = x.at(i, 0) + 0.5 * x.at(i, 1) * x.at(i, 1) + rng.normal();
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_boosted(x, y, {}, BoostObjective::squared, TreeParams{3, 50, 0.1, 10, 1.0}));
  }
}
BENCHMARK(BM_BoostedTrees)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
