#include "ttc/metrics.hpp"

#include <cmath>

#include "ttc/errors.hpp"
#include "ttc/kernels.hpp"
#include "ttc/linalg.hpp"

namespace ttc {

double rse(const DenseTensor& x, const DenseTensor& t) {
  if (x.shape() != t.shape())
    throw ArgumentError("rse: shapes " + shape_string(x.shape()) + " and " + shape_string(t.shape()) +
                        " differ");
  const double ref = kernels::squared_norm(t.data());
  if (!(ref > 0.0)) throw ArgumentError("rse: reference tensor is zero");
  return std::sqrt(kernels::squared_distance(x.data(), t.data()) / ref);
}

namespace {

std::vector<double> gaussian_kernel(int size, double sigma) {
  std::vector<double> k(static_cast<std::size_t>(size));
  const double c = (size - 1) / 2.0;
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    k[static_cast<std::size_t>(i)] = std::exp(-((i - c) * (i - c)) / (2.0 * sigma * sigma));
    sum += k[static_cast<std::size_t>(i)];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Separable 'valid' filtering of a row-major h x w plane.
std::vector<double> filter_valid(const std::vector<double>& img, Index h, Index w,
                                 const std::vector<double>& k) {
  const Index n = static_cast<Index>(k.size());
  const Index oh = h - n + 1, ow = w - n + 1;
  std::vector<double> tmp(static_cast<std::size_t>(h * ow));
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < ow; ++x) {
      double s = 0.0;
      for (Index i = 0; i < n; ++i) s += k[static_cast<std::size_t>(i)] * img[static_cast<std::size_t>(y * w + x + i)];
      tmp[static_cast<std::size_t>(y * ow + x)] = s;
    }
  std::vector<double> out(static_cast<std::size_t>(oh * ow));
  for (Index y = 0; y < oh; ++y)
    for (Index x = 0; x < ow; ++x) {
      double s = 0.0;
      for (Index i = 0; i < n; ++i) s += k[static_cast<std::size_t>(i)] * tmp[static_cast<std::size_t>((y + i) * ow + x)];
      out[static_cast<std::size_t>(y * ow + x)] = s;
    }
  return out;
}

double ssim_index(double mx, double my, double vx, double vy, double cxy, double c1, double c2) {
  return ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
}

}  // namespace

double ssim_plane(std::span<const double> a, std::span<const double> b, Index h, Index w,
                  const SsimOptions& opt, bool* fallback) {
  if (static_cast<Index>(a.size()) != h * w || static_cast<Index>(b.size()) != h * w)
    throw ArgumentError("ssim_plane: plane size mismatch");
  const double c1 = (opt.k1 * opt.dynamic_range) * (opt.k1 * opt.dynamic_range);
  const double c2 = (opt.k2 * opt.dynamic_range) * (opt.k2 * opt.dynamic_range);
  std::vector<double> x(a.size()), y(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    x[i] = a[i] * opt.input_scale;
    y[i] = b[i] * opt.input_scale;
  }
  if (fallback) *fallback = false;
  if (h < opt.window || w < opt.window) {
    if (fallback) *fallback = true;
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
    mx /= n, my /= n;
    double vx = 0, vy = 0, cxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      vx += (x[i] - mx) * (x[i] - mx);
      vy += (y[i] - my) * (y[i] - my);
      cxy += (x[i] - mx) * (y[i] - my);
    }
    return ssim_index(mx, my, vx / n, vy / n, cxy / n, c1, c2);
  }
  const auto k = gaussian_kernel(opt.window, opt.sigma);
  std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto mx = filter_valid(x, h, w, k), my = filter_valid(y, h, w, k);
  const auto sxx = filter_valid(xx, h, w, k), syy = filter_valid(yy, h, w, k),
             sxy = filter_valid(xy, h, w, k);
  double total = 0.0;
  for (std::size_t i = 0; i < mx.size(); ++i)
    total += ssim_index(mx[i], my[i], sxx[i] - mx[i] * mx[i], syy[i] - my[i] * my[i],
                        sxy[i] - mx[i] * my[i], c1, c2);
  return total / static_cast<double>(mx.size());
}

QualityReport mean_ssim(const DenseTensor& x, const DenseTensor& t, Index frame_mode,
                        const SsimOptions& opt) {
  if (x.shape() != t.shape()) throw ArgumentError("mean_ssim: shape mismatch");
  if (frame_mode < 0 || frame_mode >= x.order()) throw ArgumentError("mean_ssim: bad frame mode");
  Shape rest;
  for (Index m = 0; m < x.order(); ++m)
    if (m != frame_mode) rest.push_back(x.dim(m));
  if (rest.size() != 2 && rest.size() != 3)
    throw ArgumentError("mean_ssim: frames must be H x W or H x W x C");
  const Index F = x.dim(frame_mode), H = rest[0], W = rest[1];
  const Index C = rest.size() == 3 ? rest[2] : 1;
  const bool luminance = C == 3 && !opt.rgb_average;

  QualityReport rep;
  rep.rse = rse(x, t);
  // Column-major strides of the frame, row, column and channel modes.
  std::vector<Index> stride(static_cast<std::size_t>(x.order()), 1);
  for (Index m = 1; m < x.order(); ++m)
    stride[static_cast<std::size_t>(m)] = stride[static_cast<std::size_t>(m - 1)] * x.dim(m - 1);
  std::vector<Index> rest_stride;
  for (Index m = 0; m < x.order(); ++m)
    if (m != frame_mode) rest_stride.push_back(stride[static_cast<std::size_t>(m)]);
  const Index sf = stride[static_cast<std::size_t>(frame_mode)];
  const Index sh = rest_stride[0], sw = rest_stride[1], sc = C > 1 ? rest_stride[2] : 0;

  // Row-major H x W plane of channel c in frame f, or luminance when c < 0.
  auto plane = [&](const DenseTensor& src, Index f, Index c) {
    std::vector<double> p(static_cast<std::size_t>(H * W));
    for (Index h = 0; h < H; ++h)
      for (Index w = 0; w < W; ++w) {
        const Index base = f * sf + h * sh + w * sw;
        p[static_cast<std::size_t>(h * W + w)] =
            c >= 0 ? src[base + c * sc]
                   : 0.299 * src[base] + 0.587 * src[base + sc] + 0.114 * src[base + 2 * sc];
      }
    return p;
  };

  bool warned = false;
  for (Index f = 0; f < F; ++f) {
    double s = 0.0;
    bool fb = false;
    if (luminance) {
      s = ssim_plane(plane(x, f, -1), plane(t, f, -1), H, W, opt, &fb);
    } else {
      for (Index c = 0; c < C; ++c) s += ssim_plane(plane(x, f, c), plane(t, f, c), H, W, opt, &fb);
      s /= static_cast<double>(C);
    }
    if (fb && !warned) {
      rep.warnings.push_back("frames smaller than the " + std::to_string(opt.window) +
                             "-pixel window; using global statistics");
      warned = true;
    }
    rep.frame_ssim.push_back(s);
  }
  double sum = 0.0;
  for (double s : rep.frame_ssim) sum += s;
  rep.ssim = sum / static_cast<double>(F);
  return rep;
}

double entanglement_entropy(const DenseTensor& t, const Split& split) {
  const double norm = frobenius_norm(t);
  if (!(norm > 0.0)) throw ArgumentError("entanglement_entropy: zero tensor");
  const Vector s = singular_values(unfold(t, split).matrix) / norm;
  double S = 0.0;
  for (Index l = 0; l < s.size(); ++l) {
    if (s[l] < 1e-12) continue;
    const double p = s[l] * s[l];
    S -= p * std::log2(p);
  }
  return std::max(S, 0.0);
}

}  // namespace ttc
