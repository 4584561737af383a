#include <benchmark/benchmark.h>

#include "depthcov/directions.hpp"
#include "depthcov/distributions.hpp"
#include "depthcov/estimators.hpp"
#include "depthcov/linalg.hpp"

namespace {

void BM_DeepestCovariance(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int p = static_cast<int>(state.range(1));
  const auto data =
      depthcov::sample_gaussian(depthcov::SymmetricMatrix::identity(p), n, 41);
  const auto net = depthcov::build_sphere_net(p, 0.25, 2048, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        depthcov::deepest_covariance(data.points, net));
  }
}
BENCHMARK(BM_DeepestCovariance)
    ->Args({200, 3})
    ->Args({500, 3})
    ->Args({200, 5})
    ->Unit(benchmark::kMillisecond);

void BM_TukeyMedian(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int p = 5;
  const auto data =
      depthcov::sample_gaussian(depthcov::SymmetricMatrix::identity(p), n, 43);
  std::vector<depthcov::DirectionSet> parts;
  parts.push_back(depthcov::build_sphere_net(p, 0.25, 2048, 3));
  parts.push_back(depthcov::polarization_basis(p));
  const auto net = depthcov::merge_direction_sets(parts);
  for (auto _ : state) {
    benchmark::DoNotOptimize(depthcov::tukey_median(data.points, net));
  }
}
BENCHMARK(BM_TukeyMedian)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
