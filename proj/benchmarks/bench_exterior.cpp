#include <benchmark/benchmark.h>

#include <bit>

#include "lavgap/exterior.hpp"
#include "lavgap/sampling.hpp"

using namespace lavgap;

namespace {

ExteriorElement randomElement(Rng& rng, int dim, int degree) {
  ExteriorElement e(dim, degree);
  for (std::uint32_t m = 0; m < (1u << dim); ++m) {
    if (std::popcount(m) != static_cast<unsigned>(degree)) continue;
    e.setCoefficient(MultiIndex(m), 2.0 * rng.uniform() - 1.0);
  }
  return e;
}

void BM_Wedge(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  Rng rng(7);
  auto f = randomElement(rng, dim, 1);
  auto g = randomElement(rng, dim, dim / 2);
  for (auto _ : state) {
    auto w = wedge(f, g);
    benchmark::DoNotOptimize(w);
  }
}
BENCHMARK(BM_Wedge)->Arg(3)->Arg(4)->Arg(6);

void BM_Hodge(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  Rng rng(11);
  auto f = randomElement(rng, dim, dim / 2);
  for (auto _ : state) {
    auto h = hodge(f);
    benchmark::DoNotOptimize(h);
  }
}
BENCHMARK(BM_Hodge)->Arg(3)->Arg(6);

void BM_Contract(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  Rng rng(13);
  auto g = randomElement(rng, dim, 1);
  auto f = randomElement(rng, dim, dim - 1);
  for (auto _ : state) {
    auto c = contract(g, f);
    benchmark::DoNotOptimize(c);
  }
}
BENCHMARK(BM_Contract)->Arg(3)->Arg(6);

}  // namespace

BENCHMARK_MAIN();
