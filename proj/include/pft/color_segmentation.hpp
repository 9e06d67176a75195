#ifndef PFT_COLOR_SEGMENTATION_HPP
#define PFT_COLOR_SEGMENTATION_HPP

#include <vector>

#include "pft/geometry.hpp"
#include "pft/image.hpp"
#include "pft/rasterizer.hpp"

namespace pft {

// Global foreground/background RGB histograms, `bins` cells per channel,
// each normalized to sum 1.
struct ColorModel {
  int bins = 32;
  std::vector<float> hist_f;
  std::vector<float> hist_b;
  float learn_rate_f = 0.1f;
  float learn_rate_b = 0.2f;

  explicit ColorModel(int b = 32)
      : bins(b),
        hist_f(size_t(b) * b * b, 0.f),
        hist_b(size_t(b) * b * b, 0.f) {}

  size_t cell(Rgb8 c) const {
    const int ir = c.r * bins / 256, ig = c.g * bins / 256, ib = c.b * bins / 256;
    return (size_t(ir) * bins + ig) * bins + ib;
  }
};

// Background color probability over an ROI with its Sobel gradients
// (1/8-normalized, replicated borders).
struct ProbMap {
  Rect roi;
  ImageF values;  // P_b in [0, 1]
  ImageF grad_x;
  ImageF grad_y;
};

// Blends instantaneous histograms from the silhouette (foreground) and
// roi-minus-silhouette (background) into the model.  Returns false and leaves
// the model unchanged when either region is empty.  The silhouette mask is
// full-image sized.
bool update_color_model(ColorModel& model, const ImageRgb& image,
                        const Mask& silhouette, const Rect& roi);

// Per-pixel p_b / (p_f + p_b), both lookups floored at 1e-6.
ProbMap probability_map(const ImageRgb& image, const Rect& roi,
                        const ColorModel& model);

// dir . (grad_x, grad_y) bilinearly sampled at p (image coordinates).
// Throws OutOfRoi when p cannot be sampled inside the ROI.
double direction_gradient(const ProbMap& pm, const Vec2& p, const Vec2& dir);

}  // namespace pft

#endif  // PFT_COLOR_SEGMENTATION_HPP
