#ifndef PFT_IMAGE_HPP
#define PFT_IMAGE_HPP

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace pft {

struct Rgb8 {
  uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb8&) const = default;
};

// Axis-aligned pixel rectangle, [x, x+w) x [y, y+h) in image coordinates.
struct Rect {
  int x = 0, y = 0, w = 0, h = 0;

  bool contains(int px, int py) const {
    return px >= x && py >= y && px < x + w && py < y + h;
  }
  // True when (px, py) can be sampled bilinearly (all four neighbors inside).
  bool contains_bilinear(double px, double py) const {
    return px >= x && py >= y && px <= x + w - 1.0 && py <= y + h - 1.0;
  }
  Rect intersect(const Rect& o) const;
  bool empty() const { return w <= 0 || h <= 0; }
};

template <typename T>
class Image {
 public:
  Image() = default;
  Image(int w, int h, T fill = T{}) : w_(w), h_(h), data_(size_t(w) * h, fill) {}

  int width() const { return w_; }
  int height() const { return h_; }
  bool empty() const { return data_.empty(); }

  T& at(int x, int y) { return data_[size_t(y) * w_ + x]; }
  const T& at(int x, int y) const { return data_[size_t(y) * w_ + x]; }

  T at_clamped(int x, int y) const {
    x = x < 0 ? 0 : (x >= w_ ? w_ - 1 : x);
    y = y < 0 ? 0 : (y >= h_ ? h_ - 1 : y);
    return at(x, y);
  }

  T* row(int y) { return data_.data() + size_t(y) * w_; }
  const T* row(int y) const { return data_.data() + size_t(y) * w_; }
  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool operator==(const Image&) const = default;

 private:
  int w_ = 0, h_ = 0;
  std::vector<T> data_;
};

using ImageU8 = Image<uint8_t>;
using ImageF = Image<float>;
using ImageRgb = Image<Rgb8>;

// Bilinear sample at continuous coordinates; callers must keep (x, y) inside
// [0, w-1] x [0, h-1] (coordinates are clamped).
float bilinear(const ImageF& img, double x, double y);
float bilinear_u8(const ImageU8& img, double x, double y);

// Rec.601 luma.
ImageU8 to_grayscale(const ImageRgb& img);
ImageU8 crop(const ImageU8& img, const Rect& r);
ImageRgb crop(const ImageRgb& img, const Rect& r);

// 8-bit RGB PNG I/O; grayscale files are expanded to RGB on read.
ImageRgb read_png(const std::string& path);
void write_png(const std::string& path, const ImageRgb& img);

// Standard-normal variate built on raw mt19937 output; reproducible across
// standard libraries, unlike std::normal_distribution.
double gaussian_sample(std::mt19937& rng);
double uniform_sample(std::mt19937& rng);  // [0, 1)
// Unbiased integer in [0, n).
uint32_t uniform_index(std::mt19937& rng, uint32_t n);

}  // namespace pft

#endif  // PFT_IMAGE_HPP
