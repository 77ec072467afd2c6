#include "ttc/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "ttc/errors.hpp"
#include "ttc/kernels.hpp"

namespace ttc {

Index shape_product(std::span<const Index> shape) {
  return std::accumulate(shape.begin(), shape.end(), Index{1}, std::multiplies<>());
}

std::string shape_string(std::span<const Index> shape) {
  std::ostringstream os;
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  return os.str();
}

namespace {

void validate_shape(const Shape& shape) {
  if (shape.empty()) throw ArgumentError("tensor must have at least one mode");
  for (Index d : shape)
    if (d < 1) throw ArgumentError("tensor dimensions must be positive, got " + shape_string(shape));
}

}  // namespace

DenseTensor::DenseTensor(Shape shape) : shape_(std::move(shape)) {
  validate_shape(shape_);
  data_.assign(static_cast<std::size_t>(shape_product(shape_)), 0.0);
}

DenseTensor::DenseTensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  validate_shape(shape_);
  if (static_cast<Index>(data_.size()) != shape_product(shape_))
    throw ArgumentError("data length " + std::to_string(data_.size()) +
                        " does not match shape " + shape_string(shape_));
}

DenseTensor DenseTensor::constant(Shape shape, double value) {
  DenseTensor t(std::move(shape));
  std::fill(t.data_.begin(), t.data_.end(), value);
  return t;
}

Index DenseTensor::linear_index(std::span<const Index> idx) const {
  if (idx.size() != shape_.size()) throw ArgumentError("multi-index has wrong length");
  Index lin = 0;
  Index stride = 1;
  for (std::size_t m = 0; m < shape_.size(); ++m) {
    if (idx[m] < 0 || idx[m] >= shape_[m]) throw ArgumentError("multi-index out of range");
    lin += idx[m] * stride;
    stride *= shape_[m];
  }
  return lin;
}

void DenseTensor::multi_index(Index linear, std::span<Index> idx) const {
  for (std::size_t m = 0; m < shape_.size(); ++m) {
    idx[m] = linear % shape_[m];
    linear /= shape_[m];
  }
}

Eigen::Map<const Matrix> DenseTensor::prefix_map(Index k) const {
  const auto [rows, cols] = unfolded_dims(shape_, Split::prefix(k));
  return Eigen::Map<const Matrix>(data_.data(), rows, cols);
}

Eigen::Map<Matrix> DenseTensor::prefix_map(Index k) {
  const auto [rows, cols] = unfolded_dims(shape_, Split::prefix(k));
  return Eigen::Map<Matrix>(data_.data(), rows, cols);
}

std::string to_string(const Split& split) {
  return split.kind == Split::Kind::ModeN ? "mode-" + std::to_string(split.index + 1)
                                          : "prefix-" + std::to_string(split.index);
}

void check_split(std::span<const Index> shape, const Split& split) {
  const Index N = static_cast<Index>(shape.size());
  if (split.kind == Split::Kind::ModeN) {
    if (split.index < 0 || split.index >= N)
      throw ArgumentError("mode index " + std::to_string(split.index) + " out of range for order " +
                          std::to_string(N));
  } else if (split.index < 1 || split.index > N - 1) {
    throw ArgumentError("prefix split " + std::to_string(split.index) +
                        " outside 1.." + std::to_string(N - 1));
  }
}

std::pair<Index, Index> unfolded_dims(std::span<const Index> shape, const Split& split) {
  check_split(shape, split);
  const Index total = shape_product(shape);
  Index rows = 1;
  if (split.kind == Split::Kind::ModeN) {
    rows = shape[static_cast<std::size_t>(split.index)];
  } else {
    for (Index m = 0; m < split.index; ++m) rows *= shape[static_cast<std::size_t>(m)];
  }
  return {rows, total / rows};
}

MatricizedView unfold_mode_n(const DenseTensor& t, Index n) {
  const auto [rows, cols] = unfolded_dims(t.shape(), Split::mode_n(n));
  MatricizedView v{Matrix(rows, cols), t.shape(), Split::mode_n(n)};
  kernels::unfold_mode_n(t.data(), t.shape(), n, {v.matrix.data(), static_cast<std::size_t>(t.size())});
  return v;
}

MatricizedView unfold_prefix(const DenseTensor& t, Index k) {
  return {t.prefix_map(k), t.shape(), Split::prefix(k)};
}

MatricizedView unfold(const DenseTensor& t, const Split& split) {
  return split.kind == Split::Kind::ModeN ? unfold_mode_n(t, split.index)
                                          : unfold_prefix(t, split.index);
}

DenseTensor fold(const MatricizedView& view) {
  const auto [rows, cols] = unfolded_dims(view.origin, view.split);
  if (view.matrix.rows() != rows || view.matrix.cols() != cols)
    throw ArgumentError("cannot fold " + std::to_string(view.matrix.rows()) + "x" +
                        std::to_string(view.matrix.cols()) + " matrix into " +
                        shape_string(view.origin) + " along " + to_string(view.split));
  DenseTensor t(view.origin);
  const std::span<const double> src(view.matrix.data(), static_cast<std::size_t>(view.matrix.size()));
  if (view.split.kind == Split::Kind::ModeN)
    kernels::fold_mode_n(src, view.origin, view.split.index, t.data());
  else
    std::copy(src.begin(), src.end(), t.data().begin());
  return t;
}

double frobenius_norm(const DenseTensor& t) { return std::sqrt(kernels::squared_norm(t.data())); }

}  // namespace ttc
