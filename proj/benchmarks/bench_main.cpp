#include <benchmark/benchmark.h>

#include "freehull/annihilator.hpp"
#include "freehull/cpmap.hpp"
#include "freehull/mattuple.hpp"
#include "freehull/ncpoly.hpp"
#include "freehull/sdpcore.hpp"

namespace {

using namespace freehull;

void BM_Evaluate(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  const auto x = sample_tuple({3, n, 1.0}, 1);
  const auto p = sample_polynomial({3, 2, 2, 3, 1.0}, 2);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(p, x));
}
BENCHMARK(BM_Evaluate)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_OperatorNorm(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  const Matrix a = sample_tuple({1, n, 1.0}, 3)[0];
  for (auto _ : state) benchmark::DoNotOptimize(operator_norm(a));
}
BENCHMARK(BM_OperatorNorm)->Arg(4)->Arg(16)->Arg(64);

void BM_WordFiltration(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  const auto x = sample_tuple({2, n, 1.0}, 4);
  for (auto _ : state) benchmark::DoNotOptimize(word_filtration(x));
}
BENCHMARK(BM_WordFiltration)->Arg(2)->Arg(3)->Arg(4);

// Choi feasibility for a sampled dilation: exercises the full solver path.
void BM_SolveFeasibility(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  const auto s = sample_dilation({2, n, 2, 1.0}, 5);
  for (auto _ : state) benchmark::DoNotOptimize(choi_feasibility(s.x, s.y));
}
BENCHMARK(BM_SolveFeasibility)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_AssembleDilation(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  const auto s = sample_dilation({2, n, 2, 1.0}, 6);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_dilation(s.x, s.y));
}
BENCHMARK(BM_AssembleDilation)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
