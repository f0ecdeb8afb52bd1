#include <benchmark/benchmark.h>

#include <cmath>

#include "lavgap/quadrature.hpp"
#include "lavgap/verify.hpp"

using namespace lavgap;

namespace {

void BM_DeterministicSum(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  auto term = [](std::size_t i) { return std::sin(0.001 * static_cast<double>(i)); };
  for (auto _ : state) {
    benchmark::DoNotOptimize(deterministicSum(n, term, 0));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DeterministicSum)->Range(1 << 12, 1 << 20)->Complexity();

void BM_IntegrateReduced(benchmark::State& state) {
  // The double-phase subcritical I2 with measured set quantities; the
  // dominant cost of a verdict sweep step.
  RunConfig cfg;
  cfg.family = "double-phase";
  cfg.p = 2.0;
  cfg.q = 2.6;
  cfg.alpha = 0.5;
  cfg.N = 3;
  cfg.k = 1;
  cfg.gamma = -2.0;
  PairInstance inst = buildInstance(cfg);
  ReducedPair red = buildReducedIntegrals(inst.model, inst.plan, inst.geometry.cantor);
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrateReduced(red.I2).value);
  }
}
BENCHMARK(BM_IntegrateReduced);

void BM_BoxQuadSmooth(benchmark::State& state) {
  BoxQuadConfig cfg;
  for (int i = 0; i < 3; ++i) cfg.axes.push_back(Partition1D::uniform(-1.0, 1.0, 8));
  cfg.gaussOrder = 2;
  cfg.gaussOrderHi = 3;
  auto f = [](std::span<const double> x) {
    return std::exp(x[0] * x[1]) + x[2] * x[2];
  };
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrateBox(f, cfg).value);
  }
}
BENCHMARK(BM_BoxQuadSmooth);

void BM_GaussRuleLookup(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(gaussRule(8).size());
  }
}
BENCHMARK(BM_GaussRuleLookup);

}  // namespace
