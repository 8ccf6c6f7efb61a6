#include <benchmark/benchmark.h>

#include <vector>

#include "joinforge/muirhead.hpp"

namespace {

using namespace joinforge;

void BM_MuirheadNumeric(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  std::vector<double> a(static_cast<std::size_t>(m), 0.0);
  a[0] = 3.0;
  a[1] = 1.0;
  const MuirheadSpec spec(a);
  for (auto _ : state) benchmark::DoNotOptimize(muirhead_numeric(spec).value);
}
BENCHMARK(BM_MuirheadNumeric)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);

void BM_SymmetricSum(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const MuirheadSpec spec(std::vector<double>(static_cast<std::size_t>(m), 1.5));
  const std::vector<double> x(static_cast<std::size_t>(m), 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(symmetric_sum(x, spec));
}
BENCHMARK(BM_SymmetricSum)->DenseRange(2, 7);

}  // namespace
