#include <doctest.h>

#include <random>

#include "ttc/errors.hpp"
#include "ttc/linalg.hpp"

using namespace ttc;

namespace {

Matrix gaussian(Index r, Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(r, c);
  for (Index j = 0; j < c; ++j)
    for (Index i = 0; i < r; ++i) m(i, j) = g(rng);
  return m;
}

double nuclear(const Matrix& m) { return singular_values(m).sum(); }

double prox_objective(const Matrix& out, const Matrix& m, double gamma) {
  return gamma * nuclear(out) + 0.5 * (m - out).squaredNorm();
}

}  // namespace

TEST_CASE("svd of small diagonal matrices") {
  const SvdResult id = svd(Matrix::Identity(3, 3));
  CHECK(id.values.isApprox(Vector::Ones(3)));

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 3.0, d(1, 1) = 1.0;
  const SvdResult s = svd(d);
  CHECK(s.values[0] == doctest::Approx(3.0));
  CHECK(s.values[1] == doctest::Approx(1.0));
  CHECK(std::abs(s.U(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(s.V(1, 1)) == doctest::Approx(1.0));
}

TEST_CASE("svd reconstructs and has orthonormal factors, square and rectangular") {
  std::mt19937_64 rng(4);
  for (auto [r, c] : {std::pair<Index, Index>{8, 5}, {5, 8}, {3, 200}, {300, 4}, {17, 17}, {1, 9}}) {
    const Matrix m = gaussian(r, c, rng);
    const SvdResult s = svd(m);
    const Index k = std::min(r, c);
    REQUIRE(s.values.size() == k);
    const Matrix back = s.U * s.values.asDiagonal() * s.V.transpose();
    CHECK((back - m).norm() / m.norm() <= 1e-10);
    CHECK((s.U.transpose() * s.U - Matrix::Identity(k, k)).norm() <= 1e-10);
    CHECK((s.V.transpose() * s.V - Matrix::Identity(k, k)).norm() <= 1e-10);
    for (Index l = 1; l < k; ++l) CHECK(s.values[l] <= s.values[l - 1]);
    CHECK(singular_values(m).isApprox(s.values, 1e-12));
  }
}

TEST_CASE("svd rejects non-finite input") {
  Matrix m = Matrix::Ones(3, 3);
  m(1, 2) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(svd(m), ArgumentError);
}

TEST_CASE("shrink examples") {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 3.0, d(1, 1) = 1.0;
  Matrix expect = Matrix::Zero(2, 2);
  expect(0, 0) = 1.0;
  CHECK((shrink(d, 2.0) - expect).norm() <= 1e-12);

  std::mt19937_64 rng(6);
  const Matrix m = gaussian(5, 7, rng);
  CHECK((shrink(m, 0.0) - m).norm() <= 1e-10);
  CHECK_THROWS_AS(shrink(m, -1.0), ArgumentError);
}

TEST_CASE("shrink output beats 1000 random perturbations of the proximal objective") {
  std::mt19937_64 rng(7);
  const double gamma = 0.5;
  const Matrix m = gaussian(4, 4, rng);
  const Matrix best = shrink(m, gamma);
  const double f0 = prox_objective(best, m, gamma);
  for (int trial = 0; trial < 1000; ++trial) {
    const Matrix dir = gaussian(4, 4, rng);
    const double scale = trial < 500 ? 1e-4 : 1e-1;
    REQUIRE(f0 <= prox_objective(best + scale * dir / dir.norm(), m, gamma) + 1e-14);
  }
}

TEST_CASE("shrink nuclear norm and rank") {
  std::mt19937_64 rng(8);
  const Matrix m = gaussian(6, 9, rng);
  const Vector s = singular_values(m);
  Index previous_rank = 7;
  for (double gamma : {0.0, 0.3, 0.8, 1.5, 2.5, 4.0, 10.0}) {
    const ShrinkResult r = shrink_with_norm(m, gamma);
    const double expect = (s.array() - gamma).max(0.0).sum();
    CHECK(r.nuclear_norm == doctest::Approx(expect).epsilon(1e-12));
    CHECK(nuclear(r.matrix) == doctest::Approx(expect).epsilon(1e-9));
    CHECK(r.rank <= previous_rank);
    previous_rank = r.rank;
  }
  CHECK(previous_rank == 0);
}

TEST_CASE("ls_update_u") {
  CHECK(ls_update_u(Matrix::Identity(3, 3), Matrix::Identity(3, 3)).isApprox(Matrix::Identity(3, 3)));
  std::mt19937_64 rng(9);
  const Matrix x = gaussian(6, 8, rng), v = gaussian(2, 8, rng);
  const Matrix u = ls_update_u(x, v);
  REQUIRE(u.rows() == 6);
  REQUIRE(u.cols() == 2);
  for (Index i = 0; i < 6; ++i)
    for (Index j = 0; j < 2; ++j) {
      double acc = 0.0;
      for (Index l = 0; l < 8; ++l) acc += x(i, l) * v(j, l);
      CHECK(u(i, j) == doctest::Approx(acc).epsilon(1e-12));
    }
  CHECK(ls_update_u(x, Matrix::Zero(2, 8)).norm() == 0.0);
  CHECK_THROWS_AS(ls_update_u(x, gaussian(2, 7, rng)), ArgumentError);
}

TEST_CASE("ls_update_v examples") {
  std::mt19937_64 rng(10);
  const Matrix x = gaussian(8, 5, rng);
  const Eigen::HouseholderQR<Matrix> qr(gaussian(8, 3, rng));
  const Matrix q = qr.householderQ() * Matrix::Identity(8, 3);
  CHECK((ls_update_v(q, x) - q.transpose() * x).norm() <= 1e-10);
  CHECK(ls_update_v(Matrix::Zero(8, 3), x).norm() == 0.0);

  const Matrix u = gaussian(8, 3, rng);
  const Matrix residual = u * ls_update_v(u, x) - x;
  CHECK((u.transpose() * residual).norm() <= 1e-8);
  CHECK_THROWS_AS(ls_update_v(u, gaussian(7, 5, rng)), ArgumentError);
}

TEST_CASE("ls_update_v is the least-squares minimizer (1000 sampled competitors)") {
  std::mt19937_64 rng(11);
  const Matrix u = gaussian(10, 3, rng), x = gaussian(10, 6, rng);
  const Matrix v = ls_update_v(u, x);
  const double best = (u * v - x).norm();
  for (int trial = 0; trial < 1000; ++trial) {
    const Matrix other = trial % 2 ? gaussian(3, 6, rng) : Matrix(v + 1e-3 * gaussian(3, 6, rng));
    REQUIRE(best <= (u * other - x).norm() + 1e-12);
  }
}

TEST_CASE("the simplified U-update gives the same product as the pseudoinverse one") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix x = gaussian(7, 9, rng), v = gaussian(3, 9, rng);
    // Full update: U = x v^T (v v^T)^+.
    const Matrix u_full = x * v.transpose() * pseudoinverse(v * v.transpose());
    const Matrix u_simple = ls_update_u(x, v);
    const Matrix p_full = u_full * ls_update_v(u_full, x);
    const Matrix p_simple = u_simple * ls_update_v(u_simple, x);
    CHECK((p_full - p_simple).norm() / p_full.norm() <= 1e-8);
    CHECK((u_full - u_simple).norm() > 1e-6);
  }
}

TEST_CASE("pseudoinverse") {
  std::mt19937_64 rng(13);
  const Matrix a = gaussian(5, 3, rng);
  const Matrix p = pseudoinverse(a);
  CHECK((a * p * a - a).norm() <= 1e-10);
  CHECK((p * a * p - p).norm() <= 1e-10);
  CHECK(pseudoinverse(Matrix::Zero(3, 3)).norm() == 0.0);
}

TEST_CASE("estimate_rank") {
  Vector s(3);
  s << 10, 5, 0.01;
  CHECK(estimate_rank(s, 0.1) == 2);
  CHECK(estimate_rank(s, 1e-9) == 3);
  CHECK(estimate_rank(s, 0.5) == 1);  // 5/10 == th is excluded
  CHECK(estimate_rank(Vector::Ones(1), 0.99) == 1);
  CHECK_THROWS_AS(estimate_rank(Vector::Zero(3), 0.1), ArgumentError);
  CHECK_THROWS_AS(estimate_rank(s, 1.0), ArgumentError);
}
