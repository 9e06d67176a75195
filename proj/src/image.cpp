#include "pft/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "pft/errors.hpp"

namespace pft {

Rect Rect::intersect(const Rect& o) const {
  const int x0 = std::max(x, o.x), y0 = std::max(y, o.y);
  const int x1 = std::min(x + w, o.x + o.w), y1 = std::min(y + h, o.y + o.h);
  return {x0, y0, std::max(0, x1 - x0), std::max(0, y1 - y0)};
}

namespace {

template <typename T>
float bilinear_impl(const Image<T>& img, double x, double y) {
  x = std::clamp(x, 0.0, double(img.width() - 1));
  y = std::clamp(y, 0.0, double(img.height() - 1));
  const int x0 = std::min(int(x), img.width() - 2 >= 0 ? img.width() - 2 : 0);
  const int y0 = std::min(int(y), img.height() - 2 >= 0 ? img.height() - 2 : 0);
  const int x1 = std::min(x0 + 1, img.width() - 1);
  const int y1 = std::min(y0 + 1, img.height() - 1);
  const double fx = x - x0, fy = y - y0;
  return float((1 - fx) * (1 - fy) * img.at(x0, y0) +
               fx * (1 - fy) * img.at(x1, y0) +
               (1 - fx) * fy * img.at(x0, y1) + fx * fy * img.at(x1, y1));
}

}  // namespace

float bilinear(const ImageF& img, double x, double y) {
  return bilinear_impl(img, x, y);
}

float bilinear_u8(const ImageU8& img, double x, double y) {
  return bilinear_impl(img, x, y);
}

ImageU8 to_grayscale(const ImageRgb& img) {
  ImageU8 out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    const Rgb8* src = img.row(y);
    uint8_t* dst = out.row(y);
    for (int x = 0; x < img.width(); ++x) {
      const double v = 0.299 * src[x].r + 0.587 * src[x].g + 0.114 * src[x].b;
      dst[x] = uint8_t(std::lround(std::min(v, 255.0)));
    }
  }
  return out;
}

template <typename T>
static Image<T> crop_impl(const Image<T>& img, const Rect& r) {
  Image<T> out(r.w, r.h);
  for (int y = 0; y < r.h; ++y)
    for (int x = 0; x < r.w; ++x) out.at(x, y) = img.at(r.x + x, r.y + y);
  return out;
}

ImageU8 crop(const ImageU8& img, const Rect& r) { return crop_impl(img, r); }
ImageRgb crop(const ImageRgb& img, const Rect& r) { return crop_impl(img, r); }

ImageRgb read_png(const std::string& path) {
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "rb"),
                                           std::fclose);
  if (!fp) throw IoError("cannot open " + path);
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("png read failed: " + path);
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  png_set_strip_16(png);
  png_set_palette_to_rgb(png);
  png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  const png_byte color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const int w = int(png_get_image_width(png, info));
  const int h = int(png_get_image_height(png, info));
  ImageRgb img(w, h);
  std::vector<png_bytep> rows(h);
  for (int y = 0; y < h; ++y)
    rows[y] = reinterpret_cast<png_bytep>(img.row(y));
  png_read_image(png, rows.data());
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

void write_png(const std::string& path, const ImageRgb& img) {
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "wb"),
                                           std::fclose);
  if (!fp) throw IoError("cannot open " + path + " for writing");
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("png write failed: " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, img.width(), img.height(), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < img.height(); ++y)
    png_write_row(png, reinterpret_cast<png_const_bytep>(img.row(y)));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

double uniform_sample(std::mt19937& rng) {
  return (double(rng()) + 0.5) / 4294967296.0;
}

uint32_t uniform_index(std::mt19937& rng, uint32_t n) {
  // Rejection sampling over the top of the 32-bit range.
  const uint32_t limit = UINT32_MAX - UINT32_MAX % n;
  uint32_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % n;
}

double gaussian_sample(std::mt19937& rng) {
  // Box-Muller on raw engine output.
  const double u1 = uniform_sample(rng);
  const double u2 = uniform_sample(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace pft
