#include "ttc/mask.hpp"

#include <algorithm>
#include <numeric>

#include "ttc/errors.hpp"

namespace ttc {

ObservationMask::ObservationMask(Shape shape, std::vector<Index> indices, std::vector<double> values)
    : shape_(std::move(shape)), indices_(std::move(indices)), values_(std::move(values)) {
  if (shape_.empty()) throw ArgumentError("mask shape must have at least one mode");
  if (indices_.size() != values_.size())
    throw ArgumentError("mask indices and values differ in length");
  if (indices_.empty()) throw ArgumentError("observation mask is empty");
  const Index n = total();
  if (!std::is_sorted(indices_.begin(), indices_.end())) {
    std::vector<std::size_t> order(indices_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return indices_[a] < indices_[b]; });
    std::vector<Index> idx(order.size());
    std::vector<double> val(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      idx[i] = indices_[order[i]];
      val[i] = values_[order[i]];
    }
    indices_ = std::move(idx);
    values_ = std::move(val);
  }
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end())
    throw ArgumentError("mask indices are not unique");
  if (indices_.front() < 0 || indices_.back() >= n)
    throw ArgumentError("mask index out of range for shape " + shape_string(shape_));
}

ObservationMask::ObservationMask(Shape shape, std::vector<Index> indices)
    : ObservationMask(std::move(shape), indices, std::vector<double>(indices.size(), 0.0)) {}

ObservationMask ObservationMask::full(const DenseTensor& t) {
  std::vector<Index> idx(static_cast<std::size_t>(t.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  return ObservationMask(t.shape(), std::move(idx), {t.data().begin(), t.data().end()});
}

ObservationMask ObservationMask::observe(const DenseTensor& t) const {
  if (t.shape() != shape_)
    throw ArgumentError("cannot observe tensor of shape " + shape_string(t.shape()) +
                        " through mask of shape " + shape_string(shape_));
  std::vector<double> vals(indices_.size());
  for (std::size_t i = 0; i < indices_.size(); ++i) vals[i] = t[indices_[i]];
  ObservationMask out = *this;
  out.values_ = std::move(vals);
  return out;
}

DenseTensor ObservationMask::zero_filled() const {
  DenseTensor t(shape_);
  for (std::size_t i = 0; i < indices_.size(); ++i) t[indices_[i]] = values_[i];
  return t;
}

std::vector<unsigned char> ObservationMask::bitmap() const {
  std::vector<unsigned char> bits(static_cast<std::size_t>(total()), 0);
  for (Index i : indices_) bits[static_cast<std::size_t>(i)] = 1;
  return bits;
}

}  // namespace ttc
