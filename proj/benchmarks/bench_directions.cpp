#include <benchmark/benchmark.h>

#include "depthcov/directions.hpp"

namespace {

void BM_SphereNet(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(depthcov::build_sphere_net(p, 0.25, 4096, 7));
  }
}
BENCHMARK(BM_SphereNet)->Arg(3)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_BandedNet(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(depthcov::build_banded_net(p, 2, 0.25, 4096, 7));
  }
}
BENCHMARK(BM_BandedNet)->Arg(30)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_SparseNet(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  depthcov::SparseNetOptions opts;
  opts.allow_subsample = true;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        depthcov::build_sparse_net(p, 3, 0.25, 4096, 7, opts));
  }
}
BENCHMARK(BM_SparseNet)->Arg(20)->Arg(30)->Unit(benchmark::kMillisecond);

}  // namespace
