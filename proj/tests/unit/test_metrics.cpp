#include <doctest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "ttc/errors.hpp"
#include "ttc/linalg.hpp"
#include "ttc/metrics.hpp"
#include "ttc/synthetic.hpp"

using namespace ttc;

namespace {

DenseTensor gaussian_tensor(const Shape& shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  DenseTensor t(shape);
  for (auto& v : t.data()) v = g(rng);
  return t;
}

// Smooth test clip: drifting gradients and a moving disc, values in [0,1].
DenseTensor synthetic_clip(Index frames, Index h, Index w) {
  DenseTensor v({frames, h, w, 3});
  for (Index f = 0; f < frames; ++f)
    for (Index y = 0; y < h; ++y)
      for (Index x = 0; x < w; ++x) {
        const double cx = 10.0 + 2.0 * static_cast<double>(f), cy = 20.0;
        const bool disc = (x - cx) * (x - cx) + (y - cy) * (y - cy) < 64.0;
        for (Index c = 0; c < 3; ++c) {
          const double base = 0.2 + 0.5 * static_cast<double>(x + c * 5) / static_cast<double>(w + 10) +
                              0.2 * std::sin(0.2 * static_cast<double>(y + f));
          v.at(std::vector<Index>{f, y, x, c}) = disc ? 0.9 - 0.2 * static_cast<double>(c) : base;
        }
      }
  return v;
}

// Entropy via eigenvalues of the reduced density matrix rho = A A^T / ||A||^2,
// taken on the requested side of the unfolding.
double entropy_by_density(const Matrix& a, bool rows) {
  const Matrix rho = (rows ? Matrix(a * a.transpose()) : Matrix(a.transpose() * a)) / a.squaredNorm();
  const Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  double S = 0.0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double p = es.eigenvalues()[i];
    if (p > 1e-24) S -= p * std::log2(p);
  }
  return S;
}

}  // namespace

TEST_CASE("rse") {
  const DenseTensor t = gaussian_tensor({3, 4, 5}, 1);
  CHECK(rse(t, t) == 0.0);
  CHECK(rse(DenseTensor(t.shape()), t) == doctest::Approx(1.0));
  for (double c : {-2.0, 0.0, 0.5, 1.0, 2.0, 3.5}) {
    DenseTensor x = t;
    for (auto& v : x.data()) v *= c;
    CHECK(rse(x, t) == doctest::Approx(std::abs(c - 1.0)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(rse(DenseTensor({3, 4}), DenseTensor({3, 4})), ArgumentError);
  CHECK_THROWS_AS(rse(t, DenseTensor({3, 4, 6})), ArgumentError);
}

TEST_CASE("ssim of identical frames is one") {
  const DenseTensor v = synthetic_clip(3, 32, 40);
  const QualityReport q = mean_ssim(v, v, 0);
  CHECK(*q.ssim == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(q.frame_ssim.size() == 3);
  CHECK(q.rse == 0.0);
  CHECK(q.warnings.empty());
}

TEST_CASE("ssim of two constant frames has the closed form of the stabilizing constants") {
  const double a = 0.3, b = 0.7;
  const DenseTensor x = DenseTensor::constant({1, 16, 16, 3}, a);
  const DenseTensor y = DenseTensor::constant({1, 16, 16, 3}, b);
  const double c1 = std::pow(0.01 * 255, 2);
  const double mx = 255 * a, my = 255 * b;
  const double expect = (2 * mx * my + c1) / (mx * mx + my * my + c1);
  CHECK(*mean_ssim(x, y, 0).ssim == doctest::Approx(expect).epsilon(1e-9));
  SsimOptions rgb;
  rgb.rgb_average = true;
  CHECK(*mean_ssim(x, y, 0, rgb).ssim == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("ssim decreases as noise grows") {
  const DenseTensor v = synthetic_clip(4, 48, 48);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  DenseTensor noise(v.shape());
  for (auto& n : noise.data()) n = g(rng);
  double previous = 1.0 + 1e-12;
  for (double sigma : {0.01, 0.03, 0.06, 0.1, 0.2}) {
    DenseTensor noisy = v;
    for (Index i = 0; i < v.size(); ++i) noisy[i] += sigma * noise[i];
    const double s = *mean_ssim(noisy, v, 0).ssim;
    CHECK(s < previous);
    previous = s;
  }
}

TEST_CASE("ssim on a frame smaller than the window falls back with a warning") {
  const DenseTensor x = gaussian_tensor({2, 6, 7, 3}, 3);
  const QualityReport q = mean_ssim(x, x, 0);
  CHECK(*q.ssim == doctest::Approx(1.0));
  CHECK(q.warnings.size() == 1);
}

TEST_CASE("frame mode selects the frame axis") {
  const DenseTensor v = synthetic_clip(3, 20, 24);
  DenseTensor moved({20, 24, 3, 3});  // (H, W, C, F)
  for (Index f = 0; f < 3; ++f)
    for (Index y = 0; y < 20; ++y)
      for (Index x = 0; x < 24; ++x)
        for (Index c = 0; c < 3; ++c)
          moved.at(std::vector<Index>{y, x, c, f}) = v.at(std::vector<Index>{f, y, x, c});
  DenseTensor noisy = v, noisy_moved = moved;
  for (Index f = 0; f < 3; ++f)
    for (Index y = 0; y < 20; ++y)
      for (Index x = 0; x < 24; ++x)
        for (Index c = 0; c < 3; ++c) {
          const double d = 0.05 * std::cos(static_cast<double>(7 * x + 3 * y + 11 * c + f));
          noisy.at(std::vector<Index>{f, y, x, c}) += d;
          noisy_moved.at(std::vector<Index>{y, x, c, f}) += d;
        }
  const auto a = mean_ssim(noisy, v, 0), b = mean_ssim(noisy_moved, moved, 3);
  REQUIRE(a.frame_ssim.size() == 3);
  REQUIRE(b.frame_ssim.size() == 3);
  for (std::size_t f = 0; f < 3; ++f) CHECK(a.frame_ssim[f] == doctest::Approx(b.frame_ssim[f]).epsilon(1e-12));
  CHECK(*a.ssim < 1.0);
  CHECK_THROWS_AS(mean_ssim(v, v, 5), ArgumentError);
}

TEST_CASE("entropy endpoints") {
  // Rank-1 unfolding: no correlation.
  const DenseTensor one = gen_tt_tensor({4, 5, 6}, {1, 1}, 4);
  CHECK(entanglement_entropy(one, Split::prefix(1)) == doctest::Approx(0.0).epsilon(1e-10));

  // r equal singular values give log2 r.
  for (Index r : {2, 3, 4, 8}) {
    DenseTensor t({8, 8});
    for (Index i = 0; i < r; ++i) t.at(std::vector<Index>{i, i}) = 1.0 / std::sqrt(static_cast<double>(r));
    CHECK(entanglement_entropy(t, Split::prefix(1)) == doctest::Approx(std::log2(static_cast<double>(r))).epsilon(1e-12));
  }
  CHECK_THROWS_AS(entanglement_entropy(DenseTensor({3, 3}), Split::prefix(1)), ArgumentError);
}

TEST_CASE("entropy from the SVD agrees with both reduced density matrices") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DenseTensor t = gaussian_tensor({4, 4, 4}, 10 + seed);
    for (const Split& split : {Split::prefix(1), Split::prefix(2), Split::mode_n(1)}) {
      const Matrix a = unfold(t, split).matrix;
      const double S = entanglement_entropy(t, split);
      CHECK(std::abs(S - entropy_by_density(a, true)) <= 1e-8);
      CHECK(std::abs(S - entropy_by_density(a, false)) <= 1e-8);
      const Index r = std::min(a.rows(), a.cols());
      CHECK(S >= 0.0);
      CHECK(S <= std::log2(static_cast<double>(r)) + 1e-8);
    }
  }
}

TEST_CASE("entropy bound tracks the numerical rank") {
  const DenseTensor t = gen_tt_tensor({5, 6, 5, 6}, {2, 3, 2}, 20);
  const auto ranks = numerical_ranks(t, Scheme::TT);
  for (Index k = 1; k < 4; ++k)
    CHECK(entanglement_entropy(t, Split::prefix(k)) <=
          std::log2(static_cast<double>(ranks[static_cast<std::size_t>(k - 1)])) + 1e-8);
}
