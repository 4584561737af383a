#include <benchmark/benchmark.h>

#include "depthcov/depth.hpp"
#include "depthcov/directions.hpp"
#include "depthcov/distributions.hpp"
#include "depthcov/linalg.hpp"

namespace {

depthcov::Dataset make_data(int n, int p, std::uint64_t seed) {
  return depthcov::sample_gaussian(depthcov::SymmetricMatrix::identity(p), n, seed);
}

void BM_MatrixDepthEmpirical(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int p = static_cast<int>(state.range(1));
  const auto data = make_data(n, p, 17);
  const auto net = depthcov::build_sphere_net(p, 0.25, 2048, 3);
  const auto gamma = depthcov::SymmetricMatrix::identity(p);
  for (auto _ : state) {
    benchmark::DoNotOptimize(depthcov::matrix_depth_empirical(gamma, data.points, net));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n) *
                          net.count());
}
BENCHMARK(BM_MatrixDepthEmpirical)
    ->Args({500, 3})
    ->Args({2000, 3})
    ->Args({500, 10})
    ->Unit(benchmark::kMillisecond);

// Incremental probes are the inner loop of the coordinate ascent; the win
// over full re-evaluation is what makes the estimator affordable.
void BM_EvaluatorProbe(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int p = 5;
  const auto data = make_data(n, p, 29);
  const auto net = depthcov::build_sphere_net(p, 0.25, 2048, 3);
  depthcov::MatrixDepthEvaluator eval(data.points, net);
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Identity(p, p);
  eval.set_current(gamma);
  const int floor = 0;
  int ij = 0;
  for (auto _ : state) {
    const int i = ij % p;
    const int j = (ij / p) % p;
    benchmark::DoNotOptimize(eval.probe_entry(i, j, 0.01, floor));
    ++ij;
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_EvaluatorProbe)->Arg(500)->Arg(4000);

void BM_TukeyDepth(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int p = 5;
  const auto data = make_data(n, p, 31);
  const auto net = depthcov::build_sphere_net(p, 0.25, 2048, 3);
  const Eigen::VectorXd eta = Eigen::VectorXd::Zero(p);
  for (auto _ : state) {
    benchmark::DoNotOptimize(depthcov::tukey_depth_empirical(eta, data.points, net));
  }
}
BENCHMARK(BM_TukeyDepth)->Arg(500)->Arg(4000)->Unit(benchmark::kMillisecond);

}  // namespace
