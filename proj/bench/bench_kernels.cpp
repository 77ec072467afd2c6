// Serial reference vs OpenMP kernels. Sizes mirror the solver workloads:
// a 20^5 synthetic tensor and the 4^8 x 3 augmented image.
#include <benchmark/benchmark.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "ttc/kernels.hpp"

using namespace ttc;
namespace ref = ttc::kernels::reference;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

const Shape kShape5{20, 20, 20, 20, 20};

template <bool Parallel>
void BM_unfold(benchmark::State& st) {
  const Index n = st.range(0);
  const auto src = random_vec(static_cast<std::size_t>(shape_product(kShape5)), 1);
  std::vector<double> dst(src.size());
  for (auto _ : st) {
    if constexpr (Parallel) kernels::unfold_mode_n(src, kShape5, n, dst);
    else ref::unfold_mode_n(src, kShape5, n, dst);
    benchmark::DoNotOptimize(dst.data());
  }
  st.SetBytesProcessed(static_cast<std::int64_t>(st.iterations() * src.size() * sizeof(double) * 2));
}

template <bool Parallel>
void BM_fold(benchmark::State& st) {
  const Index n = st.range(0);
  const auto src = random_vec(static_cast<std::size_t>(shape_product(kShape5)), 2);
  std::vector<double> dst(src.size());
  for (auto _ : st) {
    if constexpr (Parallel) kernels::fold_mode_n(src, kShape5, n, dst);
    else ref::fold_mode_n(src, kShape5, n, dst);
    benchmark::DoNotOptimize(dst.data());
  }
  st.SetBytesProcessed(static_cast<std::int64_t>(st.iterations() * src.size() * sizeof(double) * 2));
}

// KA permutation of a 256x256x3 image.
template <bool Parallel>
void BM_gather(benchmark::State& st) {
  const std::size_t n = 256 * 256 * 3;
  const auto src = random_vec(n, 3);
  std::vector<Index> map(n);
  std::iota(map.begin(), map.end(), Index{0});
  std::shuffle(map.begin(), map.end(), std::mt19937_64(4));
  std::vector<double> dst(n);
  for (auto _ : st) {
    if constexpr (Parallel) kernels::gather(src, map, dst);
    else ref::gather(src, map, dst);
    benchmark::DoNotOptimize(dst.data());
  }
}

template <bool Parallel>
void BM_axpy(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto x = random_vec(n, 5);
  auto y = random_vec(n, 6);
  for (auto _ : st) {
    if constexpr (Parallel) kernels::axpy(1e-9, x, y);
    else ref::axpy(1e-9, x, y);
    benchmark::DoNotOptimize(y.data());
  }
}

template <bool Parallel>
void BM_squared_norm(benchmark::State& st) {
  const auto x = random_vec(static_cast<std::size_t>(st.range(0)), 7);
  for (auto _ : st) {
    double s = Parallel ? kernels::squared_norm(x) : ref::squared_norm(x);
    benchmark::DoNotOptimize(s);
  }
}

template <bool Parallel>
void BM_squared_distance(benchmark::State& st) {
  const auto x = random_vec(static_cast<std::size_t>(st.range(0)), 8);
  const auto y = random_vec(x.size(), 9);
  for (auto _ : st) {
    double s = Parallel ? kernels::squared_distance(x, y) : ref::squared_distance(x, y);
    benchmark::DoNotOptimize(s);
  }
}

}  // namespace

BENCHMARK(BM_unfold<false>)->Name("unfold/serial")->DenseRange(0, 4, 2);
BENCHMARK(BM_unfold<true>)->Name("unfold/omp")->DenseRange(0, 4, 2);
BENCHMARK(BM_fold<false>)->Name("fold/serial")->DenseRange(0, 4, 2);
BENCHMARK(BM_fold<true>)->Name("fold/omp")->DenseRange(0, 4, 2);
BENCHMARK(BM_gather<false>)->Name("gather/serial");
BENCHMARK(BM_gather<true>)->Name("gather/omp");
BENCHMARK(BM_axpy<false>)->Name("axpy/serial")->Arg(1 << 16)->Arg(3200000);
BENCHMARK(BM_axpy<true>)->Name("axpy/omp")->Arg(1 << 16)->Arg(3200000);
BENCHMARK(BM_squared_norm<false>)->Name("squared_norm/serial")->Arg(1 << 16)->Arg(3200000);
BENCHMARK(BM_squared_norm<true>)->Name("squared_norm/omp")->Arg(1 << 16)->Arg(3200000);
BENCHMARK(BM_squared_distance<false>)->Name("squared_distance/serial")->Arg(3200000);
BENCHMARK(BM_squared_distance<true>)->Name("squared_distance/omp")->Arg(3200000);

BENCHMARK_MAIN();
