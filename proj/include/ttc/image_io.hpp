#pragma once

#include <filesystem>
#include <vector>

#include "ttc/mask.hpp"
#include "ttc/tensor.hpp"

namespace ttc {

// 8-bit RGB from PPM (P6/P3), PGM (P5, replicated to 3 channels) or PNG.
// Returns an H x W x 3 tensor with values in [0,1].
DenseTensor load_image(const std::filesystem::path& path);

// Writes an H x W x 3 (or H x W x 1) tensor as 8-bit PPM/PGM or PNG, chosen
// by extension. Values are clamped to [0,1] and rounded to the nearest level.
void save_image(const DenseTensor& image, const std::filesystem::path& path);

// Image files of a directory in lexicographic order; (F, H, W, 3) or, with
// merge_rows, the video sequence tensor (F*H, W, 3) whose combined row is
// f*H + h.
DenseTensor load_video_frames(const std::filesystem::path& dir, bool merge_rows);
std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir);

DenseTensor merge_frame_rows(const DenseTensor& video);             // (F,H,W,C) -> (F*H,W,C)
DenseTensor split_frame_rows(const DenseTensor& vst, Index frames);  // inverse
DenseTensor frame(const DenseTensor& video, Index f);                // (F,H,W,C) -> (H,W,C)

// Observed entries: every channel of each pixel whose overlay pixel is not
// pure white.
ObservationMask mask_from_overlay(const DenseTensor& image, const DenseTensor& overlay);

// Raw tensor file: text header "ttc-tensor <order> <dims...>\n" followed by
// little-endian doubles in storage order.
void save_tensor(const DenseTensor& t, const std::filesystem::path& path);
DenseTensor load_tensor(const std::filesystem::path& path);

}  // namespace ttc
