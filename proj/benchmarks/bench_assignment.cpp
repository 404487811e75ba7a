#include <benchmark/benchmark.h>

#include "proptrack/assignment.hpp"
#include "proptrack/random.hpp"

using proptrack::CostMatrix;
using proptrack::Rng;

static void BM_SolveAssignment(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(99);
  CostMatrix m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      m.at(r, c) = rng.uniform() < 0.1 ? CostMatrix::forbidden() : rng.uniform(0.0, 100.0);
  for (auto _ : state) {
    auto pairs = proptrack::solve_assignment(m);
    benchmark::DoNotOptimize(pairs);
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_SolveAssignment)->RangeMultiplier(2)->Range(8, 128)->Complexity();
