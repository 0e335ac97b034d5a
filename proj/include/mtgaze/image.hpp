#pragma once

// Small float image container with 8-bit PNG I/O (libpng) and the affine
// warps needed for patch normalization and crop augmentation. Pixel (x, y)
// has its center at continuous coordinates (x, y); origin top-left, x right,
// y down.

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "mtgaze/common.hpp"
#include "mtgaze/geometry.hpp"

namespace mtgaze {

struct Image {
  int width = 0, height = 0, channels = 1;
  std::vector<float> data;  // row-major, interleaved channels, values [0,1]

  static Image zeros(int w, int h, int c = 1) {
    Image im;
    im.width = w;
    im.height = h;
    im.channels = c;
    im.data.assign(static_cast<size_t>(w) * h * c, 0.0f);
    return im;
  }

  float& at(int x, int y, int c = 0) {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  float at(int x, int y, int c = 0) const {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }

  bool finite() const {
    for (float v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

// Edge-clamped bilinear sample at continuous coordinates.
inline float bilinear_sample(const Image& im, double x, double y, int c = 0) {
  double fx = std::clamp(x, 0.0, static_cast<double>(im.width - 1));
  double fy = std::clamp(y, 0.0, static_cast<double>(im.height - 1));
  int x0 = static_cast<int>(std::floor(fx));
  int y0 = static_cast<int>(std::floor(fy));
  int x1 = std::min(x0 + 1, im.width - 1);
  int y1 = std::min(y0 + 1, im.height - 1);
  double ax = fx - x0, ay = fy - y0;
  double v0 = im.at(x0, y0, c) * (1 - ax) + im.at(x1, y0, c) * ax;
  double v1 = im.at(x0, y1, c) * (1 - ax) + im.at(x1, y1, c) * ax;
  return static_cast<float>(v0 * (1 - ay) + v1 * ay);
}

// 2x3 affine map p -> (a b; c d) p + (tx ty).
struct Affine2 {
  double a = 1, b = 0, c = 0, d = 1, tx = 0, ty = 0;

  Vec2 apply(const Vec2& p) const {
    return {a * p.x + b * p.y + tx, c * p.x + d * p.y + ty};
  }

  Affine2 inverse() const {
    double det = a * d - b * c;
    if (std::abs(det) < 1e-12) fail("geometry", "singular affine transform");
    Affine2 inv;
    inv.a = d / det;
    inv.b = -b / det;
    inv.c = -c / det;
    inv.d = a / det;
    inv.tx = -(inv.a * tx + inv.b * ty);
    inv.ty = -(inv.c * tx + inv.d * ty);
    return inv;
  }

  // this after o: result(p) = this(o(p))
  Affine2 compose(const Affine2& o) const {
    Affine2 r;
    r.a = a * o.a + b * o.c;
    r.b = a * o.b + b * o.d;
    r.c = c * o.a + d * o.c;
    r.d = c * o.b + d * o.d;
    r.tx = a * o.tx + b * o.ty + tx;
    r.ty = c * o.tx + d * o.ty + ty;
    return r;
  }

  static Affine2 translation(double tx, double ty) {
    return {1, 0, 0, 1, tx, ty};
  }

  static Affine2 rotation_about(const Vec2& center, double angle) {
    double co = std::cos(angle), si = std::sin(angle);
    Affine2 r{co, -si, si, co, 0, 0};
    r.tx = center.x - (co * center.x - si * center.y);
    r.ty = center.y - (si * center.x + co * center.y);
    return r;
  }

  static Affine2 scale_about(const Vec2& center, double s) {
    return {s, 0, 0, s, center.x * (1 - s), center.y * (1 - s)};
  }
};

// Resample src through the forward map (dst pixel <- src at fwd^-1(dst)).
inline Image warp_affine(const Image& src, const Affine2& fwd, int out_w,
                         int out_h) {
  Affine2 inv = fwd.inverse();
  Image out = Image::zeros(out_w, out_h, src.channels);
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      Vec2 p = inv.apply({static_cast<double>(x), static_cast<double>(y)});
      for (int c = 0; c < src.channels; ++c)
        out.at(x, y, c) = bilinear_sample(src, p.x, p.y, c);
    }
  }
  return out;
}

inline Image hflip(const Image& im) {
  Image out = Image::zeros(im.width, im.height, im.channels);
  for (int y = 0; y < im.height; ++y)
    for (int x = 0; x < im.width; ++x)
      for (int c = 0; c < im.channels; ++c)
        out.at(x, y, c) = im.at(im.width - 1 - x, y, c);
  return out;
}

// Crop the given window and resize back to (out_w, out_h).
inline Image crop_resize(const Image& im, double x0, double y0, double w,
                         double h, int out_w, int out_h) {
  Image out = Image::zeros(out_w, out_h, im.channels);
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      double sx = x0 + (x + 0.5) / out_w * w - 0.5;
      double sy = y0 + (y + 0.5) / out_h * h - 0.5;
      for (int c = 0; c < im.channels; ++c)
        out.at(x, y, c) = bilinear_sample(im, sx, sy, c);
    }
  }
  return out;
}

inline Image to_gray(const Image& im) {
  if (im.channels == 1) return im;
  Image out = Image::zeros(im.width, im.height, 1);
  for (int y = 0; y < im.height; ++y)
    for (int x = 0; x < im.width; ++x) {
      double v = 0.299 * im.at(x, y, 0) + 0.587 * im.at(x, y, 1) +
                 0.114 * im.at(x, y, 2);
      out.at(x, y) = static_cast<float>(v);
    }
  return out;
}

namespace detail {

struct PngCloser {
  std::FILE* f = nullptr;
  ~PngCloser() {
    if (f) std::fclose(f);
  }
};

}  // namespace detail

// 8-bit PNG, grayscale or RGB depending on channels.
inline void write_png(const std::filesystem::path& path, const Image& im) {
  if (im.channels != 1 && im.channels != 3)
    fail("io", "write_png: unsupported channel count " +
                   std::to_string(im.channels));
  detail::PngCloser fc;
  fc.f = std::fopen(path.string().c_str(), "wb");
  if (!fc.f) fail("io", "cannot open for writing: " + path.string());

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) fail("io", "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    fail("io", "png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail("io", "libpng write error: " + path.string());
  }
  png_init_io(png, fc.f);
  int color = im.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
  png_set_IHDR(png, info, im.width, im.height, 8, color, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::vector<unsigned char> row(static_cast<size_t>(im.width) * im.channels);
  for (int y = 0; y < im.height; ++y) {
    for (int x = 0; x < im.width; ++x)
      for (int c = 0; c < im.channels; ++c) {
        float v = std::clamp(im.at(x, y, c), 0.0f, 1.0f);
        row[static_cast<size_t>(x) * im.channels + c] =
            static_cast<unsigned char>(std::lround(v * 255.0f));
      }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

inline Image read_png(const std::filesystem::path& path) {
  detail::PngCloser fc;
  fc.f = std::fopen(path.string().c_str(), "rb");
  if (!fc.f) fail("io", "cannot open image: " + path.string());

  unsigned char sig[8];
  if (std::fread(sig, 1, 8, fc.f) != 8 || png_sig_cmp(sig, 0, 8))
    fail("io", "not a PNG file: " + path.string());

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) fail("io", "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    fail("io", "png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail("io", "libpng read error: " + path.string());
  }
  png_init_io(png, fc.f);
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  png_set_expand(png);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  int w = static_cast<int>(png_get_image_width(png, info));
  int h = static_cast<int>(png_get_image_height(png, info));
  int ch = static_cast<int>(png_get_channels(png, info));
  if (ch != 1 && ch != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail("io", "unsupported PNG channel count in " + path.string());
  }

  Image im = Image::zeros(w, h, ch);
  std::vector<unsigned char> row(static_cast<size_t>(w) * ch);
  for (int y = 0; y < h; ++y) {
    png_read_row(png, row.data(), nullptr);
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < ch; ++c)
        im.at(x, y, c) = row[static_cast<size_t>(x) * ch + c] / 255.0f;
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return im;
}

}  // namespace mtgaze
