#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ttc/tensor.hpp"

namespace ttc {

// ||x - t||_F / ||t||_F
double rse(const DenseTensor& x, const DenseTensor& t);

struct SsimOptions {
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 255.0;
  int window = 11;
  double sigma = 1.5;
  // Pixel values are multiplied by this before scoring; tensors loaded by
  // load_image() hold [0,1] values, so 255 maps them onto 8-bit range.
  double input_scale = 255.0;
  // Score each colour channel and average instead of using luminance.
  bool rgb_average = false;
};

// Gaussian-window SSIM of two single-channel images (row-major, h x w).
// Windows are placed only where they fit; images smaller than the window
// fall back to one global-statistics window and set `fallback`.
double ssim_plane(std::span<const double> a, std::span<const double> b, Index h, Index w,
                  const SsimOptions& opt = {}, bool* fallback = nullptr);

struct QualityReport {
  double rse = 0.0;
  std::optional<double> ssim;  // mean over frames
  std::vector<double> frame_ssim;
  std::vector<std::string> warnings;
};

// Per-frame SSIM averaged over frames. `frame_mode` is the 0-based frame
// axis; the remaining modes are (H, W) or (H, W, C). With C == 3 frames are
// scored on luminance unless opt.rgb_average is set.
QualityReport mean_ssim(const DenseTensor& x, const DenseTensor& t, Index frame_mode,
                        const SsimOptions& opt = {});

// Von Neumann entropy -sum s^2 log2 s^2 of the unit-normalized unfolding.
// Singular values below 1e-12 are dropped.
double entanglement_entropy(const DenseTensor& t, const Split& split);

}  // namespace ttc
