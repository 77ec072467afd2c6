#pragma once

#include <string>
#include <vector>

#include "ttc/mask.hpp"
#include "ttc/tensor.hpp"

namespace ttc {

// Ket augmentation layout: an H x W x C visual tensor is addressed by nested
// blocks. Level l splits each block into u_l x v_l sub-blocks labelled
// row-major (up-left, up-right, ..., down-right for 2x2), so
//   row = sum_l r_l * prod_{m<l} u_m,  col = sum_l c_l * prod_{m<l} v_m,
//   i_l = r_l * v_l + c_l.
// Level 1 is the finest block. The augmented tensor has modes
// (u_1 v_1, ..., u_n v_n, C) in fine-to-coarse order, or the block modes
// reversed (coarse-to-fine) with `coarse_first`; the colour mode stays last.
struct KaLevel {
  Index u = 2;
  Index v = 2;
  bool operator==(const KaLevel&) const = default;
};

class KaLayout {
 public:
  KaLayout(Index height, Index width, Index channels, std::vector<KaLevel> levels,
           bool coarse_first = false);

  // n levels of (u, v), e.g. uniform(256, 256, 3, 2, 2) is the 4^8 x 3 layout.
  static KaLayout uniform(Index height, Index width, Index channels, Index u, Index v,
                          bool coarse_first = false);

  Index height() const noexcept { return height_; }
  Index width() const noexcept { return width_; }
  Index channels() const noexcept { return channels_; }
  const std::vector<KaLevel>& levels() const noexcept { return levels_; }
  bool coarse_first() const noexcept { return coarse_first_; }

  Shape source_shape() const { return {height_, width_, channels_}; }
  Shape augmented_shape() const;

  // For each augmented linear offset, the source linear offset it reads.
  const std::vector<Index>& source_of() const noexcept { return source_of_; }
  // Inverse permutation: source offset -> augmented offset.
  const std::vector<Index>& target_of() const noexcept { return target_of_; }

  // Plain-text level list, e.g. "2x2 2x2 2x2". parse_levels() also accepts
  // commas and a "UxV^n" repetition shorthand.
  std::string levels_string() const;

 private:
  void build_maps();

  Index height_, width_, channels_;
  std::vector<KaLevel> levels_;
  bool coarse_first_;
  std::vector<Index> source_of_;
  std::vector<Index> target_of_;
};

std::vector<KaLevel> parse_levels(const std::string& text);

DenseTensor ka_forward(const DenseTensor& image, const KaLayout& layout);
DenseTensor ka_inverse(const DenseTensor& augmented, const KaLayout& layout);
ObservationMask ka_mask(const ObservationMask& mask, const KaLayout& layout);
// Maps a mask over the augmented shape back to the source shape.
ObservationMask ka_mask_inverse(const ObservationMask& mask, const KaLayout& layout);

// Grows an H x W x C image to height x width by repeating its last row and
// column; crop() undoes it.
DenseTensor pad_replicate(const DenseTensor& image, Index height, Index width);
DenseTensor crop(const DenseTensor& image, Index height, Index width);

}  // namespace ttc
