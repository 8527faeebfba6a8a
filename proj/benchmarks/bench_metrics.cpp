// Hot metric paths: ranking with tie correction dominates feature ranking,
// and the ROC sweep runs once per candidate subset during selection.
#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "subsetforge/metrics.hpp"

using namespace subsetforge;

namespace {

// Coarse integer grid so tie handling is actually exercised.
std::vector<double> tied_values(std::size_t n, std::uint64_t seed, int levels) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = static_cast<double>(rng.uniform_int(0, levels - 1));
  return v;
}

std::vector<int> balanced_labels(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<int> y(n);
  for (int& l : y) l = rng.uniform() < 0.38 ? 1 : 0;
  y[0] = 1;  // both classes, whatever the draw
  y[1] = 0;
  return y;
}

void BM_spearman(benchmark::State& state) {
  std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<double> x = tied_values(n, 11, 40);
  std::vector<double> y = tied_values(n, 12, 40);
  for (auto _ : state) benchmark::DoNotOptimize(spearman(x, y));
  state.SetComplexityN(static_cast<std::int64_t>(n));
}
BENCHMARK(BM_spearman)->Arg(100)->Arg(1000)->Arg(10000)->Complexity(benchmark::oNLogN);

void BM_average_ranks(benchmark::State& state) {
  std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<double> x = tied_values(n, 13, 40);
  for (auto _ : state) benchmark::DoNotOptimize(average_ranks(x));
  state.SetComplexityN(static_cast<std::int64_t>(n));
}
BENCHMARK(BM_average_ranks)->Arg(100)->Arg(1000)->Arg(10000)->Complexity(benchmark::oNLogN);

void BM_roc_auc(benchmark::State& state) {
  std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<int> y = balanced_labels(n, 14);
  std::vector<double> s = tied_values(n, 15, 256);
  for (double& v : s) v /= 255.0;
  for (auto _ : state) benchmark::DoNotOptimize(roc_auc(y, s).auc);
  state.SetComplexityN(static_cast<std::int64_t>(n));
}
BENCHMARK(BM_roc_auc)->Arg(100)->Arg(1000)->Arg(10000)->Complexity(benchmark::oNLogN);

}  // namespace
