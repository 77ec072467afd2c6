#include "ttc/kernels.hpp"

#include <cmath>
#include <vector>

#include <omp.h>

namespace ttc::kernels {
namespace {

constexpr Index kChunk = 1 << 13;
// Below this many elements the thread start-up cost dominates.
constexpr Index kParallelMin = 1 << 14;

struct ModeSplit {
  Index before;  // product of dims preceding mode n
  Index dim;     // I_n
  Index after;   // product of dims following mode n
};

ModeSplit split_at(std::span<const Index> shape, Index n) {
  ModeSplit s{1, shape[static_cast<std::size_t>(n)], 1};
  for (Index m = 0; m < n; ++m) s.before *= shape[static_cast<std::size_t>(m)];
  for (Index m = n + 1; m < static_cast<Index>(shape.size()); ++m)
    s.after *= shape[static_cast<std::size_t>(m)];
  return s;
}

template <typename ChunkFn>
double chunked_sum(Index n, ChunkFn&& fn) {
  const Index chunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(static_cast<std::size_t>(chunks), 0.0);
#pragma omp parallel for schedule(static) if (n >= kParallelMin)
  for (Index c = 0; c < chunks; ++c) {
    const Index lo = c * kChunk;
    const Index hi = std::min(n, lo + kChunk);
    partial[static_cast<std::size_t>(c)] = fn(lo, hi);
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace

// Source offset a + A*(i + I_n*b) lands at row i, column a + A*b.
void unfold_mode_n(std::span<const double> src, std::span<const Index> shape, Index n,
                   std::span<double> dst) {
  const auto [A, In, B] = split_at(shape, n);
  const Index total = A * In * B;
#pragma omp parallel for schedule(static) if (total >= kParallelMin)
  for (Index b = 0; b < B; ++b) {
    for (Index i = 0; i < In; ++i) {
      const double* s = src.data() + A * (i + In * b);
      double* d = dst.data() + i + In * A * b;
      for (Index a = 0; a < A; ++a) d[In * a] = s[a];
    }
  }
}

void fold_mode_n(std::span<const double> src, std::span<const Index> shape, Index n,
                 std::span<double> dst) {
  const auto [A, In, B] = split_at(shape, n);
  const Index total = A * In * B;
#pragma omp parallel for schedule(static) if (total >= kParallelMin)
  for (Index b = 0; b < B; ++b) {
    for (Index i = 0; i < In; ++i) {
      const double* s = src.data() + i + In * A * b;
      double* d = dst.data() + A * (i + In * b);
      for (Index a = 0; a < A; ++a) d[a] = s[In * a];
    }
  }
}

void gather(std::span<const double> src, std::span<const Index> map, std::span<double> dst) {
  const Index n = static_cast<Index>(map.size());
#pragma omp parallel for schedule(static) if (n >= kParallelMin)
  for (Index i = 0; i < n; ++i) dst[i] = src[map[i]];
}

void scatter(std::span<const double> src, std::span<const Index> map, std::span<double> dst) {
  const Index n = static_cast<Index>(map.size());
#pragma omp parallel for schedule(static) if (n >= kParallelMin)
  for (Index i = 0; i < n; ++i) dst[map[i]] = src[i];
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  const Index n = static_cast<Index>(x.size());
  // Raw pointers: through the span members the outlined loop does not vectorize.
  const double* xp = x.data();
  double* yp = y.data();
#pragma omp parallel for simd schedule(static) if (n >= kParallelMin)
  for (Index i = 0; i < n; ++i) yp[i] += a * xp[i];
}

void scale_into(double a, std::span<const double> x, std::span<double> y) {
  const Index n = static_cast<Index>(x.size());
  const double* xp = x.data();
  double* yp = y.data();
#pragma omp parallel for simd schedule(static) if (n >= kParallelMin)
  for (Index i = 0; i < n; ++i) yp[i] = a * xp[i];
}

double squared_norm(std::span<const double> x) {
  return chunked_sum(static_cast<Index>(x.size()), [&](Index lo, Index hi) {
    double s = 0.0;
    for (Index i = lo; i < hi; ++i) s += x[i] * x[i];
    return s;
  });
}

double squared_distance(std::span<const double> x, std::span<const double> y) {
  return chunked_sum(static_cast<Index>(x.size()), [&](Index lo, Index hi) {
    double s = 0.0;
    for (Index i = lo; i < hi; ++i) {
      const double d = x[i] - y[i];
      s += d * d;
    }
    return s;
  });
}

bool all_finite(std::span<const double> x) {
  const Index n = static_cast<Index>(x.size());
  int bad = 0;
#pragma omp parallel for reduction(| : bad) schedule(static) if (n >= kParallelMin)
  for (Index i = 0; i < n; ++i) bad |= std::isfinite(x[i]) ? 0 : 1;
  return bad == 0;
}

}  // namespace ttc::kernels
