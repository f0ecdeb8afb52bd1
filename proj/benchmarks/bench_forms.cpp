#include <benchmark/benchmark.h>

#include "lavgap/forms.hpp"
#include "lavgap/sampling.hpp"

using namespace lavgap;

namespace {

// Representative evaluation costs for the N=3 subcritical geometry
// (two Cantor axes, the convolution workhorse of the energy integrals).

PairGeometry subcriticalGeometry(bool adaptive) {
  PairGeometry g = makeGeometry(3, CantorSpec::generalized(0.25, -2.0, 2), 8);
  g.adaptiveTree = adaptive;
  return g;
}

void BM_UTypeDerivative(benchmark::State& state) {
  PairGeometry geom = subcriticalGeometry(true);
  FormField u = makeUType(geom);
  Rng rng(17);
  std::vector<double> x(3);
  for (auto _ : state) {
    x[0] = 1.4 * (rng.uniform() - 0.5);
    x[1] = 1.4 * (rng.uniform() - 0.5);
    x[2] = 0.2 * (rng.uniform() - 0.5);
    benchmark::DoNotOptimize(u.evalDerivative(x).normSq());
  }
}
BENCHMARK(BM_UTypeDerivative);

void BM_ATypeValueTree(benchmark::State& state) {
  PairGeometry geom = subcriticalGeometry(state.range(0) != 0);
  FormField A = makeAType(geom);
  Rng rng(19);
  std::vector<double> x(3);
  for (auto _ : state) {
    x[0] = 0.9 * (rng.uniform() - 0.5);
    x[1] = 0.9 * (rng.uniform() - 0.5);
    x[2] = 0.3 + 0.5 * rng.uniform();
    benchmark::DoNotOptimize(A.eval(x).normSq());
  }
}
BENCHMARK(BM_ATypeValueTree)->Arg(1)->Arg(0);  // adaptive vs full depth-8 sum

void BM_ATypeDerivativeTree(benchmark::State& state) {
  PairGeometry geom = subcriticalGeometry(true);
  FormField A = makeAType(geom);
  Rng rng(23);
  std::vector<double> x(3);
  for (auto _ : state) {
    x[0] = 0.9 * (rng.uniform() - 0.5);
    x[1] = 0.9 * (rng.uniform() - 0.5);
    x[2] = 0.05 + 0.2 * rng.uniform();
    benchmark::DoNotOptimize(A.evalDerivative(x).normSq());
  }
}
BENCHMARK(BM_ATypeDerivativeTree);

void BM_SeparatorRho(benchmark::State& state) {
  PairGeometry geom = subcriticalGeometry(true);
  ScalarField rho = makeRhoField(geom);
  Rng rng(29);
  std::vector<double> x(3);
  for (auto _ : state) {
    x[0] = 1.4 * (rng.uniform() - 0.5);
    x[1] = 1.4 * (rng.uniform() - 0.5);
    x[2] = 1.4 * (rng.uniform() - 0.5);
    benchmark::DoNotOptimize(rho(x));
  }
}
BENCHMARK(BM_SeparatorRho);

}  // namespace
