#include "ttc/augment.hpp"

#include <algorithm>
#include <sstream>

#include "ttc/errors.hpp"
#include "ttc/kernels.hpp"

namespace ttc {

KaLayout::KaLayout(Index height, Index width, Index channels, std::vector<KaLevel> levels,
                   bool coarse_first)
    : height_(height), width_(width), channels_(channels), levels_(std::move(levels)),
      coarse_first_(coarse_first) {
  if (height_ < 1 || width_ < 1 || channels_ < 1) throw ArgumentError("layout dimensions must be positive");
  if (levels_.empty()) throw ArgumentError("layout needs at least one level");
  Index hu = 1, wv = 1;
  for (const KaLevel& l : levels_) {
    if (l.u < 1 || l.v < 1) throw ArgumentError("layout level factors must be positive");
    hu *= l.u;
    wv *= l.v;
  }
  if (hu != height_ || wv != width_)
    throw ArgumentError("levels " + levels_string() + " cover " + std::to_string(hu) + "x" +
                        std::to_string(wv) + " pixels, image is " + std::to_string(height_) + "x" +
                        std::to_string(width_));
  build_maps();
}

KaLayout KaLayout::uniform(Index height, Index width, Index channels, Index u, Index v,
                           bool coarse_first) {
  if (u < 2 && v < 2) throw ArgumentError("uniform layout needs a factor >= 2");
  std::vector<KaLevel> levels;
  Index h = height, w = width;
  while (h > 1 || w > 1) {
    const Index lu = h > 1 ? u : 1;
    const Index lv = w > 1 ? v : 1;
    if (h % lu != 0 || w % lv != 0)
      throw ArgumentError(std::to_string(height) + "x" + std::to_string(width) +
                          " does not factor into " + std::to_string(u) + "x" + std::to_string(v) +
                          " blocks");
    h /= lu;
    w /= lv;
    levels.push_back({lu, lv});
  }
  return KaLayout(height, width, channels, std::move(levels), coarse_first);
}

Shape KaLayout::augmented_shape() const {
  Shape s;
  for (const KaLevel& l : levels_) s.push_back(l.u * l.v);
  if (coarse_first_) std::reverse(s.begin(), s.end());
  s.push_back(channels_);
  return s;
}

std::string KaLayout::levels_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < levels_.size(); ++i)
    os << (i ? " " : "") << levels_[i].u << "x" << levels_[i].v;
  return os.str();
}

void KaLayout::build_maps() {
  const Index pixels = height_ * width_;
  const Index total = pixels * channels_;
  const std::size_t n = levels_.size();
  source_of_.assign(static_cast<std::size_t>(total), 0);
  target_of_.assign(static_cast<std::size_t>(total), 0);

  // Stride of each level's mode in the augmented tensor.
  std::vector<Index> stride(n);
  Index acc = 1;
  for (std::size_t m = 0; m < n; ++m) {
    const std::size_t level = coarse_first_ ? n - 1 - m : m;
    stride[level] = acc;
    acc *= levels_[level].u * levels_[level].v;
  }
  for (Index w = 0; w < width_; ++w) {
    for (Index h = 0; h < height_; ++h) {
      Index offset = 0;
      Index hr = h, wc = w;
      for (std::size_t l = 0; l < n; ++l) {
        const Index r = hr % levels_[l].u, c = wc % levels_[l].v;
        hr /= levels_[l].u;
        wc /= levels_[l].v;
        offset += (r * levels_[l].v + c) * stride[l];
      }
      for (Index ch = 0; ch < channels_; ++ch) {
        const Index src = h + height_ * (w + width_ * ch);
        const Index dst = offset + pixels * ch;
        source_of_[static_cast<std::size_t>(dst)] = src;
        target_of_[static_cast<std::size_t>(src)] = dst;
      }
    }
  }
}

std::vector<KaLevel> parse_levels(const std::string& text) {
  std::string cleaned = text;
  std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
  std::istringstream is(cleaned);
  std::vector<KaLevel> out;
  std::string token;
  while (is >> token) {
    Index u = 0, v = 0, repeat = 1;
    char x = 0;
    std::istringstream ts(token);
    if (!(ts >> u >> x >> v) || (x != 'x' && x != 'X'))
      throw ArgumentError("bad layout level '" + token + "', expected UxV or UxV^n");
    char caret = 0;
    if (ts >> caret) {
      if (caret != '^' || !(ts >> repeat) || repeat < 1)
        throw ArgumentError("bad layout repetition in '" + token + "'");
    }
    for (Index i = 0; i < repeat; ++i) out.push_back({u, v});
  }
  if (out.empty()) throw ArgumentError("empty layout level list");
  return out;
}

DenseTensor ka_forward(const DenseTensor& image, const KaLayout& layout) {
  if (image.shape() != layout.source_shape())
    throw ArgumentError("image shape " + shape_string(image.shape()) + " does not match layout " +
                        shape_string(layout.source_shape()));
  DenseTensor out(layout.augmented_shape());
  kernels::gather(image.data(), layout.source_of(), out.data());
  return out;
}

DenseTensor ka_inverse(const DenseTensor& augmented, const KaLayout& layout) {
  if (augmented.shape() != layout.augmented_shape())
    throw ArgumentError("augmented shape " + shape_string(augmented.shape()) +
                        " does not match layout " + shape_string(layout.augmented_shape()));
  DenseTensor out(layout.source_shape());
  kernels::gather(augmented.data(), layout.target_of(), out.data());
  return out;
}

namespace {

ObservationMask remap(const ObservationMask& mask, const std::vector<Index>& map, Shape shape) {
  std::vector<Index> idx(mask.indices().size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = map[static_cast<std::size_t>(mask.indices()[i])];
  return ObservationMask(std::move(shape), std::move(idx), mask.values());
}

}  // namespace

ObservationMask ka_mask(const ObservationMask& mask, const KaLayout& layout) {
  if (mask.shape() != layout.source_shape())
    throw ArgumentError("mask shape " + shape_string(mask.shape()) + " does not match layout " +
                        shape_string(layout.source_shape()));
  return remap(mask, layout.target_of(), layout.augmented_shape());
}

ObservationMask ka_mask_inverse(const ObservationMask& mask, const KaLayout& layout) {
  if (mask.shape() != layout.augmented_shape())
    throw ArgumentError("mask shape " + shape_string(mask.shape()) + " does not match layout " +
                        shape_string(layout.augmented_shape()));
  return remap(mask, layout.source_of(), layout.source_shape());
}

DenseTensor pad_replicate(const DenseTensor& image, Index height, Index width) {
  if (image.order() != 3) throw ArgumentError("pad_replicate expects an H x W x C tensor");
  const Index H = image.dim(0), W = image.dim(1), C = image.dim(2);
  if (height < H || width < W) throw ArgumentError("pad target smaller than image");
  DenseTensor out({height, width, C});
  for (Index c = 0; c < C; ++c)
    for (Index w = 0; w < width; ++w)
      for (Index h = 0; h < height; ++h)
        out[h + height * (w + width * c)] =
            image[std::min(h, H - 1) + H * (std::min(w, W - 1) + W * c)];
  return out;
}

DenseTensor crop(const DenseTensor& image, Index height, Index width) {
  if (image.order() != 3) throw ArgumentError("crop expects an H x W x C tensor");
  const Index H = image.dim(0), W = image.dim(1), C = image.dim(2);
  if (height > H || width > W || height < 1 || width < 1) throw ArgumentError("bad crop size");
  DenseTensor out({height, width, C});
  for (Index c = 0; c < C; ++c)
    for (Index w = 0; w < width; ++w)
      for (Index h = 0; h < height; ++h) out[h + height * (w + width * c)] = image[h + H * (w + W * c)];
  return out;
}

}  // namespace ttc
