#include "pft/color_segmentation.hpp"

#include <algorithm>
#include <cmath>

#include "pft/errors.hpp"

namespace pft {

namespace {

void normalize_hist(std::vector<float>& h) {
  double sum = 0;
  for (float v : h) sum += v;
  if (sum <= 0) return;
  const float inv = float(1.0 / sum);
  for (float& v : h) v *= inv;
}

}  // namespace

bool update_color_model(ColorModel& model, const ImageRgb& image,
                        const Mask& silhouette, const Rect& roi_in) {
  const Rect roi = roi_in.intersect({0, 0, image.width(), image.height()});
  std::vector<float> inst_f(model.hist_f.size(), 0.f);
  std::vector<float> inst_b(model.hist_b.size(), 0.f);
  size_t n_f = 0, n_b = 0;
  for (int y = roi.y; y < roi.y + roi.h; ++y)
    for (int x = roi.x; x < roi.x + roi.w; ++x) {
      const size_t c = model.cell(image.at(x, y));
      if (silhouette.at(x, y)) {
        inst_f[c] += 1.f;
        ++n_f;
      } else {
        inst_b[c] += 1.f;
        ++n_b;
      }
    }
  if (n_f == 0 || n_b == 0) return false;
  normalize_hist(inst_f);
  normalize_hist(inst_b);
  const float af = model.learn_rate_f, ab = model.learn_rate_b;
  for (size_t i = 0; i < inst_f.size(); ++i) {
    model.hist_f[i] = (1.f - af) * model.hist_f[i] + af * inst_f[i];
    model.hist_b[i] = (1.f - ab) * model.hist_b[i] + ab * inst_b[i];
  }
  normalize_hist(model.hist_f);
  normalize_hist(model.hist_b);
  return true;
}

ProbMap probability_map(const ImageRgb& image, const Rect& roi_in,
                        const ColorModel& model) {
  const Rect roi = roi_in.intersect({0, 0, image.width(), image.height()});
  ProbMap pm;
  pm.roi = roi;
  pm.values = ImageF(roi.w, roi.h);
  pm.grad_x = ImageF(roi.w, roi.h);
  pm.grad_y = ImageF(roi.w, roi.h);

  constexpr float kEps = 1e-6f;
  for (int y = 0; y < roi.h; ++y)
    for (int x = 0; x < roi.w; ++x) {
      const size_t c = model.cell(image.at(roi.x + x, roi.y + y));
      const float pf = std::max(model.hist_f[c], kEps);
      const float pb = std::max(model.hist_b[c], kEps);
      pm.values.at(x, y) = pb / (pf + pb);
    }

  // Sobel 3x3 with 1/8 normalization, replicated edges.
  const auto& v = pm.values;
  for (int y = 0; y < roi.h; ++y)
    for (int x = 0; x < roi.w; ++x) {
      const float v00 = v.at_clamped(x - 1, y - 1), v10 = v.at_clamped(x, y - 1),
                  v20 = v.at_clamped(x + 1, y - 1);
      const float v01 = v.at_clamped(x - 1, y), v21 = v.at_clamped(x + 1, y);
      const float v02 = v.at_clamped(x - 1, y + 1), v12 = v.at_clamped(x, y + 1),
                  v22 = v.at_clamped(x + 1, y + 1);
      pm.grad_x.at(x, y) =
          ((v20 + 2 * v21 + v22) - (v00 + 2 * v01 + v02)) / 8.f;
      pm.grad_y.at(x, y) =
          ((v02 + 2 * v12 + v22) - (v00 + 2 * v10 + v20)) / 8.f;
    }
  return pm;
}

double direction_gradient(const ProbMap& pm, const Vec2& p, const Vec2& dir) {
  const double lx = p.x() - pm.roi.x;
  const double ly = p.y() - pm.roi.y;
  if (!Rect{0, 0, pm.roi.w, pm.roi.h}.contains_bilinear(lx, ly))
    throw OutOfRoi();
  const double gx = bilinear(pm.grad_x, lx, ly);
  const double gy = bilinear(pm.grad_y, lx, ly);
  return dir.x() * gx + dir.y() * gy;
}

}  // namespace pft
