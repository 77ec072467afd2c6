#pragma once

#include "ttc/tensor.hpp"

namespace ttc {

// Thin SVD: m = U * diag(values) * V^T with r = min(rows, cols).
struct SvdResult {
  Matrix U;       // rows x r, orthonormal columns
  Vector values;  // length r, nonincreasing, nonnegative
  Matrix V;       // cols x r, orthonormal columns
};

// Thin SVD. Highly rectangular inputs (one side at least 4x the other) are
// first reduced by a Householder QR of the long side, so the dense SVD only
// ever runs on the small square factor.
SvdResult svd(const Eigen::Ref<const Matrix>& m);

// Singular values only, same reduction as svd().
Vector singular_values(const Eigen::Ref<const Matrix>& m);

// Singular-value soft thresholding: U * diag(max(s - gamma, 0)) * V^T, the
// proximal map of gamma * ||.||_*.
Matrix shrink(const Eigen::Ref<const Matrix>& m, double gamma);

struct ShrinkResult {
  Matrix matrix;
  double nuclear_norm = 0.0;  // sum of the thresholded singular values
  Index rank = 0;             // number of singular values that survived
};
ShrinkResult shrink_with_norm(const Eigen::Ref<const Matrix>& m, double gamma);

// Singular values below kPinvCutoff * s_max are treated as zero.
inline constexpr double kPinvCutoff = 1e-12;
Matrix pseudoinverse(const Eigen::Ref<const Matrix>& m);

// U-update of the factorization engine: x * v^T. Skips the (v v^T)^+ factor;
// the following V-update makes U*V independent of it.
Matrix ls_update_u(const Eigen::Ref<const Matrix>& x, const Eigen::Ref<const Matrix>& v);

// Least-squares V-update (u^T u)^+ u^T x, i.e. argmin_V ||u V - x||_F.
Matrix ls_update_v(const Eigen::Ref<const Matrix>& u, const Eigen::Ref<const Matrix>& x);

// Number of singular values with s_l / s_1 > th (strict), at least 1.
Index estimate_rank(const Eigen::Ref<const Vector>& values, double th);

}  // namespace ttc
