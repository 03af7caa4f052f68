// Serial reference vs OpenMP kernels for the dataset-wide loss and gradient.
#include <benchmark/benchmark.h>

#include <random>

#include "cvxreg/kernels.hpp"

namespace {

using namespace cvxreg;

Dataset make_dataset(Eigen::Index n, Eigen::Index d) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Matrix x(n, d);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = unit(rng);
    y[i] = unit(rng);
  }
  return Dataset(std::move(x), std::move(y));
}

const TransformKind kTransform = ConvexSqrtTransform(1.0, 1.0);

void BM_LossSerial(benchmark::State& state) {
  const Dataset ds = make_dataset(state.range(0), 8);
  const Vector w = Vector::Constant(8, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(reference::total_loss(kTransform, w, ds));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_LossParallel(benchmark::State& state) {
  const Dataset ds = make_dataset(state.range(0), 8);
  const Vector w = Vector::Constant(8, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::total_loss(kTransform, w, ds));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_GradientSerial(benchmark::State& state) {
  const Dataset ds = make_dataset(state.range(0), 8);
  const Vector w = Vector::Constant(8, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(reference::total_gradient(kTransform, w, ds));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_GradientParallel(benchmark::State& state) {
  const Dataset ds = make_dataset(state.range(0), 8);
  const Vector w = Vector::Constant(8, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::total_gradient(kTransform, w, ds));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_LossSerial)->RangeMultiplier(10)->Range(1000, 1000000);
BENCHMARK(BM_LossParallel)->RangeMultiplier(10)->Range(1000, 1000000);
BENCHMARK(BM_GradientSerial)->RangeMultiplier(10)->Range(1000, 1000000);
BENCHMARK(BM_GradientParallel)->RangeMultiplier(10)->Range(1000, 1000000);

BENCHMARK_MAIN();
