#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "pcx/convexity.hpp"
#include "pcx/oracle.hpp"
#include "pcx/pcm.hpp"
#include "pcx/rng.hpp"
#include "pcx/solvers.hpp"

namespace {

pcx::PCMatrix random_matrix(std::uint64_t seed, std::size_t n, double max_entry) {
  auto gen = pcx::make_stream(seed, n);
  const double span = std::log(max_entry);
  std::vector<double> up(n * (n - 1) / 2);
  for (double& v : up) v = std::exp(pcx::uniform(gen, -span, span));
  return pcx::PCMatrix(n, std::move(up));
}

void BM_SolveLsmAdmissible(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_matrix(1, n, pcx::convexity::constants().a0);
  for (auto _ : state) benchmark::DoNotOptimize(pcx::solve_lsm(a));
}
BENCHMARK(BM_SolveLsmAdmissible)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_SolveLsmMultiStart(benchmark::State& state) {
  const auto a = random_matrix(2, 8, 9.0);
  for (auto _ : state) benchmark::DoNotOptimize(pcx::solve_lsm(a));
}
BENCHMARK(BM_SolveLsmMultiStart)->Unit(benchmark::kMillisecond);

void BM_Inconsistency(benchmark::State& state) {
  const auto a = random_matrix(3, static_cast<std::size_t>(state.range(0)), 9.0);
  for (auto _ : state) benchmark::DoNotOptimize(pcx::inconsistency(a));
}
BENCHMARK(BM_Inconsistency)->Arg(8)->Arg(20);

void BM_OtherMethods(benchmark::State& state) {
  const auto a = random_matrix(4, 8, 9.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pcx::solve_wlsm(a));
    benchmark::DoNotOptimize(pcx::solve_llsm(a));
    benchmark::DoNotOptimize(pcx::solve_evm(a));
  }
}
BENCHMARK(BM_OtherMethods)->Unit(benchmark::kMicrosecond);

void BM_GridOracle3x3(benchmark::State& state) {
  const auto a = pcx::build_matrix(3, {3, 5, 3});
  pcx::oracle::GridSpec spec;
  spec.points_per_axis = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(pcx::oracle::grid_min_lsm(a, spec));
}
BENCHMARK(BM_GridOracle3x3)->Arg(201)->Arg(601)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
