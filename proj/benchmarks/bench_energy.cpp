#include <benchmark/benchmark.h>

#include <vector>

#include "joinforge/energy.hpp"
#include "joinforge/orbit.hpp"

namespace {

using namespace joinforge;

// n particles in the leftmost leaves of a binary tree of the given depth.
Configuration leftmost(int depth, int n) {
  const TreeParams tree(2, depth);
  std::vector<Vertex> leaves;
  for (int i = 0; i < n; ++i) leaves.push_back(tree.vertex_at(depth, static_cast<std::uint64_t>(i)));
  return Configuration(tree, Vertex::root(), std::move(leaves));
}

void BM_FactorizedEnergy(benchmark::State& state) {
  const Configuration c = leftmost(static_cast<int>(state.range(0)), 4);
  const WeightAssignment mu = WeightAssignment::uniform(c.tree(), 1.0);
  const LevelFunction f = LevelFunction::constant(c.tree(), 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(orbit_energy_factorized(c, mu, f).value);
  state.counters["orbit"] = static_cast<double>(orbit_size(c));
}
BENCHMARK(BM_FactorizedEnergy)->DenseRange(3, 15, 3);

void BM_BruteforceEnergy(benchmark::State& state) {
  const Configuration c = leftmost(static_cast<int>(state.range(0)), 4);
  const WeightAssignment mu = WeightAssignment::uniform(c.tree(), 1.0);
  const LevelFunction f = LevelFunction::constant(c.tree(), 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(orbit_energy_bruteforce(c, mu, f).value);
  state.counters["orbit"] = static_cast<double>(orbit_size(c));
}
BENCHMARK(BM_BruteforceEnergy)->DenseRange(3, 6, 1)->Unit(benchmark::kMillisecond);

void BM_OrbitSize(benchmark::State& state) {
  const Configuration c = leftmost(12, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(orbit_size(c));
}
BENCHMARK(BM_OrbitSize)->RangeMultiplier(2)->Range(2, 32);

}  // namespace
BENCHMARK_MAIN();
