#include <cmath>
#include <vector>

#include "ttc/kernels.hpp"

namespace ttc::kernels::reference {
namespace {

// Column-major strides of `shape`.
std::vector<Index> strides_of(std::span<const Index> shape) {
  std::vector<Index> s(shape.size(), 1);
  for (std::size_t m = 1; m < shape.size(); ++m) s[m] = s[m - 1] * shape[m - 1];
  return s;
}

// Column j of the mode-n unfolding for the multi-index `idx`, written exactly
// as the textbook index map: j = sum_{k != n} i_k * J_k, J_k = prod_{m<k, m!=n} I_m.
Index column_of(std::span<const Index> shape, std::span<const Index> idx, Index n) {
  Index j = 0;
  Index stride = 1;
  for (Index k = 0; k < static_cast<Index>(shape.size()); ++k) {
    if (k == n) continue;
    j += idx[static_cast<std::size_t>(k)] * stride;
    stride *= shape[static_cast<std::size_t>(k)];
  }
  return j;
}

template <typename Fn>
void for_each_index(std::span<const Index> shape, Fn&& fn) {
  std::vector<Index> idx(shape.size(), 0);
  const auto strides = strides_of(shape);
  Index total = 1;
  for (Index d : shape) total *= d;
  for (Index lin = 0; lin < total; ++lin) {
    fn(lin, std::span<const Index>(idx));
    for (std::size_t m = 0; m < idx.size(); ++m) {
      if (++idx[m] < shape[m]) break;
      idx[m] = 0;
    }
  }
}

}  // namespace

void unfold_mode_n(std::span<const double> src, std::span<const Index> shape, Index n,
                   std::span<double> dst) {
  const Index rows = shape[static_cast<std::size_t>(n)];
  for_each_index(shape, [&](Index lin, std::span<const Index> idx) {
    dst[idx[static_cast<std::size_t>(n)] + rows * column_of(shape, idx, n)] = src[lin];
  });
}

void fold_mode_n(std::span<const double> src, std::span<const Index> shape, Index n,
                 std::span<double> dst) {
  const Index rows = shape[static_cast<std::size_t>(n)];
  for_each_index(shape, [&](Index lin, std::span<const Index> idx) {
    dst[lin] = src[idx[static_cast<std::size_t>(n)] + rows * column_of(shape, idx, n)];
  });
}

void gather(std::span<const double> src, std::span<const Index> map, std::span<double> dst) {
  for (std::size_t i = 0; i < map.size(); ++i) dst[i] = src[map[i]];
}

void scatter(std::span<const double> src, std::span<const Index> map, std::span<double> dst) {
  for (std::size_t i = 0; i < map.size(); ++i) dst[map[i]] = src[i];
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void scale_into(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = a * x[i];
}

double squared_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

double squared_distance(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  return s;
}

bool all_finite(std::span<const double> x) {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace ttc::kernels::reference
