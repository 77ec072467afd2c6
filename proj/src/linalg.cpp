#include "ttc/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "ttc/errors.hpp"

namespace ttc {
namespace {

constexpr Index kAspectForQr = 4;

void require_finite(const Eigen::Ref<const Matrix>& m) {
  if (!m.allFinite()) throw ArgumentError("svd input contains non-finite entries");
}

SvdResult dense_svd(const Eigen::Ref<const Matrix>& m, bool vectors) {
  const unsigned opts = vectors ? (Eigen::ComputeThinU | Eigen::ComputeThinV) : 0u;
  Eigen::BDCSVD<Matrix> dec(m, opts);
  if (dec.info() != Eigen::Success)
    throw NumericalError("SVD of " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                         " matrix did not converge");
  SvdResult out;
  out.values = dec.singularValues();
  if (vectors) {
    out.U = dec.matrixU();
    out.V = dec.matrixV();
  }
  return out;
}

// Tall input: m = Q R, R = Ur S V^T, so U = Q Ur.
SvdResult tall_svd(const Eigen::Ref<const Matrix>& m, bool vectors) {
  const Index n = m.cols();
  Eigen::HouseholderQR<Matrix> qr(m);
  const Matrix R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  SvdResult small = dense_svd(R, vectors);
  if (vectors) {
    Matrix U = Matrix::Identity(m.rows(), n);
    U = qr.householderQ() * U;
    small.U = U * small.U;
  }
  return small;
}

SvdResult svd_impl(const Eigen::Ref<const Matrix>& m, bool vectors) {
  require_finite(m);
  if (m.size() == 0) throw ArgumentError("svd of an empty matrix");
  if (m.rows() >= kAspectForQr * m.cols()) return tall_svd(m, vectors);
  if (m.cols() >= kAspectForQr * m.rows()) {
    SvdResult t = tall_svd(m.transpose(), vectors);
    std::swap(t.U, t.V);
    return t;
  }
  return dense_svd(m, vectors);
}

}  // namespace

SvdResult svd(const Eigen::Ref<const Matrix>& m) { return svd_impl(m, true); }

Vector singular_values(const Eigen::Ref<const Matrix>& m) { return svd_impl(m, false).values; }

namespace {

// Shrinkage of a highly rectangular matrix through the Gram matrix of its
// short side: for a wide m with m m^T = U diag(s^2) U^T,
//   shrink(m) = U_r diag(1 - gamma/s) U_r^T m
// over the singular values s > gamma. Only the kept components are formed.
ShrinkResult gram_shrink(const Eigen::Ref<const Matrix>& m, double gamma) {
  const bool wide = m.rows() <= m.cols();
  const Index n = wide ? m.rows() : m.cols();
  Matrix gram = Matrix::Zero(n, n);
  if (wide)
    gram.selfadjointView<Eigen::Lower>().rankUpdate(m);
  else
    gram.selfadjointView<Eigen::Lower>().rankUpdate(m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram.selfadjointView<Eigen::Lower>());
  if (es.info() != Eigen::Success)
    throw NumericalError("eigendecomposition of a " + std::to_string(n) + "x" + std::to_string(n) +
                         " Gram matrix did not converge");
  // Eigenvalues come in increasing order.
  ShrinkResult out;
  Index keep = 0;
  for (Index i = n - 1; i >= 0; --i) {
    const double s = std::sqrt(std::max(es.eigenvalues()[i], 0.0));
    if (!(s > gamma)) break;
    ++keep;
    out.nuclear_norm += s - gamma;
  }
  out.rank = keep;
  if (keep == 0) {
    out.matrix = Matrix::Zero(m.rows(), m.cols());
    return out;
  }
  const Matrix basis = es.eigenvectors().rightCols(keep);
  Vector scale(keep);
  for (Index i = 0; i < keep; ++i)
    scale[i] = 1.0 - gamma / std::sqrt(es.eigenvalues()[n - keep + i]);
  if (2 * keep > n) {
    // Most components survive: one n x n projector is cheaper than two
    // rank-keep products against the long side.
    const Matrix proj = basis * scale.asDiagonal() * basis.transpose();
    if (wide)
      out.matrix.noalias() = proj * m;
    else
      out.matrix.noalias() = m * proj;
  } else if (wide) {
    const Matrix coeff = basis.transpose() * m;
    out.matrix.noalias() = basis * scale.asDiagonal() * coeff;
  } else {
    const Matrix coeff = m * basis;
    out.matrix.noalias() = coeff * scale.asDiagonal() * basis.transpose();
  }
  return out;
}

}  // namespace

ShrinkResult shrink_with_norm(const Eigen::Ref<const Matrix>& m, double gamma) {
  if (!(gamma >= 0.0)) throw ArgumentError("shrinkage threshold must be nonnegative");
  require_finite(m);
  if (m.size() == 0) throw ArgumentError("shrink of an empty matrix");
  if (m.rows() >= kAspectForQr * m.cols() || m.cols() >= kAspectForQr * m.rows())
    return gram_shrink(m, gamma);
  const SvdResult s = svd(m);
  Index keep = 0;
  while (keep < s.values.size() && s.values[keep] > gamma) ++keep;
  ShrinkResult out;
  out.rank = keep;
  if (keep == 0) {
    out.matrix = Matrix::Zero(m.rows(), m.cols());
    return out;
  }
  const Vector kept = s.values.head(keep).array() - gamma;
  out.nuclear_norm = kept.sum();
  out.matrix.noalias() = s.U.leftCols(keep) * kept.asDiagonal() * s.V.leftCols(keep).transpose();
  return out;
}

Matrix shrink(const Eigen::Ref<const Matrix>& m, double gamma) {
  return shrink_with_norm(m, gamma).matrix;
}

Matrix pseudoinverse(const Eigen::Ref<const Matrix>& m) {
  require_finite(m);
  Eigen::JacobiSVD<Matrix> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = dec.singularValues();
  Vector inv = Vector::Zero(s.size());
  if (s.size() > 0 && s[0] > 0.0) {
    const double cutoff = kPinvCutoff * s[0];
    for (Index i = 0; i < s.size(); ++i)
      if (s[i] > cutoff) inv[i] = 1.0 / s[i];
  }
  return dec.matrixV() * inv.asDiagonal() * dec.matrixU().transpose();
}

Matrix ls_update_u(const Eigen::Ref<const Matrix>& x, const Eigen::Ref<const Matrix>& v) {
  if (x.cols() != v.cols())
    throw ArgumentError("ls_update_u: x has " + std::to_string(x.cols()) + " columns, v has " +
                        std::to_string(v.cols()));
  Matrix u;
  u.noalias() = x * v.transpose();
  return u;
}

Matrix ls_update_v(const Eigen::Ref<const Matrix>& u, const Eigen::Ref<const Matrix>& x) {
  if (u.rows() != x.rows())
    throw ArgumentError("ls_update_v: u has " + std::to_string(u.rows()) + " rows, x has " +
                        std::to_string(x.rows()));
  Matrix gram;
  gram.noalias() = u.transpose() * u;
  if (!gram.allFinite()) throw NumericalError("ls_update_v: Gram matrix overflowed");
  Matrix utx;
  utx.noalias() = u.transpose() * x;
  Matrix v;
  v.noalias() = pseudoinverse(gram) * utx;
  return v;
}

Index estimate_rank(const Eigen::Ref<const Vector>& values, double th) {
  if (values.size() == 0 || !(values[0] > 0.0))
    throw ArgumentError("estimate_rank: spectrum is empty or all zero");
  if (!(th > 0.0 && th < 1.0)) throw ArgumentError("estimate_rank: th must lie in (0,1)");
  Index r = 0;
  for (Index l = 0; l < values.size(); ++l)
    if (values[l] / values[0] > th) ++r;
  return std::max<Index>(r, 1);
}

}  // namespace ttc
