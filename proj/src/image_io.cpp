#include "ttc/image_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include <png.h>

#include "ttc/errors.hpp"

namespace fs = std::filesystem;

namespace ttc {
namespace {

std::string lower_ext(const fs::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e;
}

// Interleaved 8-bit pixels, row-major, `channels` per pixel.
struct Raster {
  Index height = 0, width = 0, channels = 0;
  std::vector<unsigned char> bytes;
};

DenseTensor to_tensor(const Raster& r) {
  DenseTensor t({r.height, r.width, 3});
  for (Index h = 0; h < r.height; ++h)
    for (Index w = 0; w < r.width; ++w)
      for (Index c = 0; c < 3; ++c) {
        const Index src_c = r.channels >= 3 ? c : 0;
        const unsigned char b = r.bytes[static_cast<std::size_t>((h * r.width + w) * r.channels + src_c)];
        t[h + r.height * (w + r.width * c)] = b / 255.0;
      }
  return t;
}

Raster to_raster(const DenseTensor& t) {
  if (t.order() != 3 && t.order() != 2) throw ArgumentError("image tensor must be H x W x C");
  Raster r{t.dim(0), t.dim(1), t.order() == 3 ? t.dim(2) : 1, {}};
  if (r.channels != 1 && r.channels != 3) throw ArgumentError("images need 1 or 3 channels");
  r.bytes.resize(static_cast<std::size_t>(r.height * r.width * r.channels));
  for (Index h = 0; h < r.height; ++h)
    for (Index w = 0; w < r.width; ++w)
      for (Index c = 0; c < r.channels; ++c) {
        const double v = std::clamp(t[h + r.height * (w + r.width * c)], 0.0, 1.0);
        r.bytes[static_cast<std::size_t>((h * r.width + w) * r.channels + c)] =
            static_cast<unsigned char>(std::lround(v * 255.0));
      }
  return r;
}

void skip_pnm_space(std::istream& is) {
  for (;;) {
    const int c = is.peek();
    if (c == '#') {
      std::string line;
      std::getline(is, line);
    } else if (std::isspace(c)) {
      is.get();
    } else {
      return;
    }
  }
}

Raster read_pnm(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  std::string magic;
  is >> magic;
  if (magic != "P6" && magic != "P5" && magic != "P3") throw IoError(path.string() + ": unsupported PNM type '" + magic + "'");
  Index w = 0, h = 0;
  int maxval = 0;
  skip_pnm_space(is);
  is >> w;
  skip_pnm_space(is);
  is >> h;
  skip_pnm_space(is);
  is >> maxval;
  if (!is || w < 1 || h < 1 || maxval != 255) throw IoError(path.string() + ": expected an 8-bit PNM header");
  Raster r{h, w, magic == "P5" ? 1 : 3, {}};
  r.bytes.resize(static_cast<std::size_t>(w * h * r.channels));
  if (magic == "P3") {
    for (auto& b : r.bytes) {
      int v = 0;
      is >> v;
      b = static_cast<unsigned char>(v);
    }
  } else {
    is.get();
    is.read(reinterpret_cast<char*>(r.bytes.data()), static_cast<std::streamsize>(r.bytes.size()));
  }
  if (!is) throw IoError(path.string() + ": truncated pixel data");
  return r;
}

void write_pnm(const Raster& r, const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path.string());
  os << (r.channels == 1 ? "P5" : "P6") << "\n" << r.width << " " << r.height << "\n255\n";
  os.write(reinterpret_cast<const char*>(r.bytes.data()), static_cast<std::streamsize>(r.bytes.size()));
  if (!os) throw IoError("failed writing " + path.string());
}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

Raster read_png(const fs::path& path) {
  File fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("cannot open " + path.string());
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("libpng initialization failed");
  }
  Raster r;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(path.string() + ": not a readable PNG");
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_packing(png);
  png_set_palette_to_rgb(png);
  png_set_expand_gray_1_2_4_to_8(png);
  png_read_update_info(png, info);
  r.width = png_get_image_width(png, info);
  r.height = png_get_image_height(png, info);
  r.channels = png_get_channels(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  r.bytes.resize(stride * static_cast<std::size_t>(r.height));
  std::vector<png_bytep> rows(static_cast<std::size_t>(r.height));
  for (Index y = 0; y < r.height; ++y) rows[static_cast<std::size_t>(y)] = r.bytes.data() + stride * static_cast<std::size_t>(y);
  png_read_image(png, rows.data());
  png_destroy_read_struct(&png, &info, nullptr);
  return r;
}

void write_png(const Raster& r, const fs::path& path) {
  File fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError("cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed writing " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(r.width), static_cast<png_uint_32>(r.height), 8,
               r.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(r.width * r.channels);
  for (Index y = 0; y < r.height; ++y)
    png_write_row(png, const_cast<png_bytep>(r.bytes.data() + stride * static_cast<std::size_t>(y)));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

bool is_image_file(const fs::path& p) {
  const std::string e = lower_ext(p);
  return e == ".png" || e == ".ppm" || e == ".pgm" || e == ".pnm";
}

}  // namespace

DenseTensor load_image(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("no such file: " + path.string());
  const std::string e = lower_ext(path);
  if (e == ".png") return to_tensor(read_png(path));
  if (e == ".ppm" || e == ".pgm" || e == ".pnm") return to_tensor(read_pnm(path));
  throw IoError(path.string() + ": unsupported image format (use PNG or PPM)");
}

void save_image(const DenseTensor& image, const fs::path& path) {
  const Raster r = to_raster(image);
  const std::string e = lower_ext(path);
  if (e == ".png")
    write_png(r, path);
  else if (e == ".ppm" || e == ".pgm" || e == ".pnm")
    write_pnm(r, path);
  else
    throw IoError(path.string() + ": unsupported image format (use PNG or PPM)");
}

std::vector<fs::path> list_frames(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw IoError("no image frames in " + dir.string());
  return files;
}

DenseTensor load_video_frames(const fs::path& dir, bool merge_rows) {
  const auto files = list_frames(dir);
  std::vector<DenseTensor> frames;
  for (const auto& f : files) frames.push_back(load_image(f));
  const Index H = frames[0].dim(0), W = frames[0].dim(1);
  std::string offenders;
  for (std::size_t i = 0; i < frames.size(); ++i)
    if (frames[i].dim(0) != H || frames[i].dim(1) != W)
      offenders += " " + files[i].filename().string() + "(" + shape_string(frames[i].shape()) + ")";
  if (!offenders.empty())
    throw ArgumentError("frames differ from " + shape_string(frames[0].shape()) + ":" + offenders);
  const Index F = static_cast<Index>(frames.size());
  DenseTensor video({F, H, W, 3});
  for (Index f = 0; f < F; ++f)
    for (Index i = 0; i < H * W * 3; ++i) video[f + F * i] = frames[static_cast<std::size_t>(f)][i];
  return merge_rows ? merge_frame_rows(video) : video;
}

DenseTensor merge_frame_rows(const DenseTensor& video) {
  if (video.order() != 4) throw ArgumentError("merge_frame_rows expects (F,H,W,C)");
  const Index F = video.dim(0), H = video.dim(1), W = video.dim(2), C = video.dim(3);
  DenseTensor out({F * H, W, C});
  for (Index c = 0; c < C; ++c)
    for (Index w = 0; w < W; ++w)
      for (Index h = 0; h < H; ++h)
        for (Index f = 0; f < F; ++f)
          out[(f * H + h) + F * H * (w + W * c)] = video[f + F * (h + H * (w + W * c))];
  return out;
}

DenseTensor split_frame_rows(const DenseTensor& vst, Index frames) {
  if (vst.order() != 3 || frames < 1 || vst.dim(0) % frames != 0)
    throw ArgumentError("split_frame_rows: combined rows not divisible by frame count");
  const Index F = frames, H = vst.dim(0) / frames, W = vst.dim(1), C = vst.dim(2);
  DenseTensor out({F, H, W, C});
  for (Index c = 0; c < C; ++c)
    for (Index w = 0; w < W; ++w)
      for (Index h = 0; h < H; ++h)
        for (Index f = 0; f < F; ++f)
          out[f + F * (h + H * (w + W * c))] = vst[(f * H + h) + F * H * (w + W * c)];
  return out;
}

DenseTensor frame(const DenseTensor& video, Index f) {
  if (video.order() != 4 || f < 0 || f >= video.dim(0)) throw ArgumentError("frame: bad index");
  const Index F = video.dim(0), rest = video.size() / F;
  DenseTensor out({video.dim(1), video.dim(2), video.dim(3)});
  for (Index i = 0; i < rest; ++i) out[i] = video[f + F * i];
  return out;
}

ObservationMask mask_from_overlay(const DenseTensor& image, const DenseTensor& overlay) {
  if (image.order() != 3 || overlay.order() != 3 || image.dim(0) != overlay.dim(0) ||
      image.dim(1) != overlay.dim(1))
    throw ArgumentError("overlay size " + shape_string(overlay.shape()) + " does not match image " +
                        shape_string(image.shape()));
  const Index H = image.dim(0), W = image.dim(1), C = image.dim(2), OC = overlay.dim(2);
  std::vector<Index> idx;
  std::vector<double> vals;
  for (Index c = 0; c < C; ++c)
    for (Index w = 0; w < W; ++w)
      for (Index h = 0; h < H; ++h) {
        bool white = true;
        for (Index oc = 0; oc < OC; ++oc) white = white && overlay[h + H * (w + W * oc)] >= 1.0;
        if (white) continue;
        const Index lin = h + H * (w + W * c);
        idx.push_back(lin);
        vals.push_back(image[lin]);
      }
  if (idx.empty()) throw ArgumentError("overlay marks every pixel missing");
  return ObservationMask(image.shape(), std::move(idx), std::move(vals));
}

void save_tensor(const DenseTensor& t, const fs::path& path) {
  static_assert(std::endian::native == std::endian::little, "tensor files are little-endian");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path.string());
  os << "ttc-tensor " << t.order();
  for (Index d : t.shape()) os << " " << d;
  os << "\n";
  os.write(reinterpret_cast<const char*>(t.data().data()), static_cast<std::streamsize>(t.size() * sizeof(double)));
  if (!os) throw IoError("failed writing " + path.string());
}

DenseTensor load_tensor(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  std::string line;
  std::getline(is, line);
  std::istringstream hs(line);
  std::string magic;
  Index order = 0;
  hs >> magic >> order;
  if (magic != "ttc-tensor" || order < 1) throw IoError(path.string() + ": not a ttc tensor file");
  Shape shape(static_cast<std::size_t>(order));
  for (auto& d : shape) hs >> d;
  if (!hs) throw IoError(path.string() + ": bad tensor header");
  std::vector<double> data(static_cast<std::size_t>(shape_product(shape)));
  is.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (!is) throw IoError(path.string() + ": truncated tensor data");
  return DenseTensor(std::move(shape), std::move(data));
}

}  // namespace ttc
