#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ttc {

using Index = std::ptrdiff_t;
using Shape = std::vector<Index>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

Index shape_product(std::span<const Index> shape);
std::string shape_string(std::span<const Index> shape);

// Dense N-way array of doubles stored column-major in mode order: the first
// index varies fastest. Multi-indices are 0-based.
class DenseTensor {
 public:
  DenseTensor() = default;
  explicit DenseTensor(Shape shape);
  DenseTensor(Shape shape, std::vector<double> data);

  static DenseTensor constant(Shape shape, double value);

  const Shape& shape() const noexcept { return shape_; }
  Index order() const noexcept { return static_cast<Index>(shape_.size()); }
  Index dim(Index mode) const { return shape_.at(static_cast<std::size_t>(mode)); }
  Index size() const noexcept { return static_cast<Index>(data_.size()); }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }
  std::vector<double>& storage() noexcept { return data_; }

  double operator[](Index linear) const { return data_[static_cast<std::size_t>(linear)]; }
  double& operator[](Index linear) { return data_[static_cast<std::size_t>(linear)]; }

  double at(std::span<const Index> idx) const { return (*this)[linear_index(idx)]; }
  double& at(std::span<const Index> idx) { return (*this)[linear_index(idx)]; }

  Index linear_index(std::span<const Index> idx) const;
  void multi_index(Index linear, std::span<Index> idx) const;

  // Zero-copy view of the mode-(1..k) matricization.
  Eigen::Map<const Matrix> prefix_map(Index k) const;
  Eigen::Map<Matrix> prefix_map(Index k);

  bool operator==(const DenseTensor&) const = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

// Which matricization produced a matrix. ModeN carries a 0-based mode;
// Prefix carries k, the number of leading modes mapped to rows (1..N-1).
struct Split {
  enum class Kind { ModeN, Prefix };
  Kind kind = Kind::Prefix;
  Index index = 1;

  static Split mode_n(Index n) { return {Kind::ModeN, n}; }
  static Split prefix(Index k) { return {Kind::Prefix, k}; }

  bool operator==(const Split&) const = default;
};

std::string to_string(const Split& split);

// Row and column counts of the matricization of `shape` along `split`.
std::pair<Index, Index> unfolded_dims(std::span<const Index> shape, const Split& split);
void check_split(std::span<const Index> shape, const Split& split);

struct MatricizedView {
  Matrix matrix;
  Shape origin;
  Split split;
};

MatricizedView unfold_mode_n(const DenseTensor& t, Index n);
MatricizedView unfold_prefix(const DenseTensor& t, Index k);
MatricizedView unfold(const DenseTensor& t, const Split& split);
DenseTensor fold(const MatricizedView& view);

double frobenius_norm(const DenseTensor& t);

}  // namespace ttc
