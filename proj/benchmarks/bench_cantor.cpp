#include <benchmark/benchmark.h>

#include "lavgap/cantor.hpp"
#include "lavgap/sampling.hpp"
#include "lavgap/verify.hpp"

using namespace lavgap;

namespace {

void BM_Distance1D(benchmark::State& state) {
  CantorSet set(CantorSpec::generalized(0.25, -2.0));
  Rng rng(3);
  double x = 0.0;
  for (auto _ : state) {
    x = 1.4 * (rng.uniform() - 0.5);
    benchmark::DoNotOptimize(set.distance(x).value);
  }
}
BENCHMARK(BM_Distance1D);

void BM_ProductDistance(benchmark::State& state) {
  auto prod = CantorProduct::make(CantorSpec::generalized(0.25, -2.0, 2));
  Rng rng(5);
  std::vector<double> x(2);
  for (auto _ : state) {
    x[0] = 1.4 * (rng.uniform() - 0.5);
    x[1] = 1.4 * (rng.uniform() - 0.5);
    benchmark::DoNotOptimize(prod->distanceWithGradient(x).value);
  }
}
BENCHMARK(BM_ProductDistance);

void BM_BallMass(benchmark::State& state) {
  auto prod = CantorProduct::make(CantorSpec::generalized(0.25, 0.0, 2));
  std::vector<double> center{-0.5, -0.5};
  const double t = 1e-4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(prod->ballMass(center, t, 14));
  }
}
BENCHMARK(BM_BallMass);

void BM_SupBallMass(benchmark::State& state) {
  auto prod = CantorProduct::make(CantorSpec::generalized(0.25, 0.0, 1));
  const double t = state.range(0) == 0 ? 1e-3 : 1e-6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(supBallMass(*prod, t));
  }
}
BENCHMARK(BM_SupBallMass)->Arg(0)->Arg(1);

void BM_NeighborhoodVolume(benchmark::State& state) {
  auto prod = CantorProduct::make(CantorSpec::generalized(0.25, 0.0, 1));
  const double t = 1e-5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(neighborhoodVolume(*prod, t).numeric);
  }
}
BENCHMARK(BM_NeighborhoodVolume);

}  // namespace
