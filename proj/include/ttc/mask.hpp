#pragma once

#include <vector>

#include "ttc/tensor.hpp"

namespace ttc {

// Observed index set Omega over a declared shape together with the observed
// values T_Omega. Indices are column-major linear offsets, kept sorted and
// unique; values[i] belongs to indices[i].
class ObservationMask {
 public:
  ObservationMask() = default;
  ObservationMask(Shape shape, std::vector<Index> indices, std::vector<double> values);
  // Index set only; values are zero until bound with observe().
  ObservationMask(Shape shape, std::vector<Index> indices);

  static ObservationMask full(const DenseTensor& t);

  const Shape& shape() const noexcept { return shape_; }
  const std::vector<Index>& indices() const noexcept { return indices_; }
  const std::vector<double>& values() const noexcept { return values_; }
  Index count() const noexcept { return static_cast<Index>(indices_.size()); }
  Index total() const noexcept { return shape_product(shape_); }

  // Fraction of unobserved entries, 1 - |Omega| / prod(I_k).
  double missing_ratio() const noexcept {
    return 1.0 - static_cast<double>(count()) / static_cast<double>(total());
  }

  // Same index set with values read from `t`.
  ObservationMask observe(const DenseTensor& t) const;

  // Zeros off Omega, T on Omega.
  DenseTensor zero_filled() const;

  // 1 for observed entries, 0 otherwise.
  std::vector<unsigned char> bitmap() const;

 private:
  Shape shape_;
  std::vector<Index> indices_;
  std::vector<double> values_;
};

}  // namespace ttc
