#include <benchmark/benchmark.h>

#include <Eigen/Dense>
#include <random>

#include "cogspeech/model/estimators.h"

namespace {

void Blobs(int n, int d, Eigen::MatrixXd& x, Eigen::VectorXd& y) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  x.resize(n, d);
  y.resize(n);
  for (int i = 0; i < n; ++i) {
    y(i) = i % 2 ? 1.0 : -1.0;
    for (int j = 0; j < d; ++j) x(i, j) = g(rng) + 0.3 * y(i);
  }
}

void BM_LinearSvm(benchmark::State& state) {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  Blobs(static_cast<int>(state.range(0)), 34, x, y);
  for (auto _ : state) benchmark::DoNotOptimize(cogspeech::model::LinearSvmFit(x, y, {}));
}
BENCHMARK(BM_LinearSvm)->Arg(100)->Arg(400);

void BM_Ridge(benchmark::State& state) {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  Blobs(static_cast<int>(state.range(0)), 768, x, y);
  for (auto _ : state) benchmark::DoNotOptimize(cogspeech::model::RidgeFit(x, y, 1.0));
}
BENCHMARK(BM_Ridge)->Arg(100)->Arg(400);

}  // namespace
