#include "pft/contour_modality.hpp"

#include <cmath>

#include "pft/errors.hpp"

namespace pft {

namespace {

struct DirectionTable {
  Vec2 dirs[kNumFanDirections];
  DirectionTable() {
    for (int i = 0; i < kNumFanDirections; ++i) {
      const double a = 2.0 * M_PI * i / kNumFanDirections;
      dirs[i] = Vec2(std::cos(a), std::sin(a));
    }
  }
};

const DirectionTable& table() {
  static const DirectionTable t;
  return t;
}

}  // namespace

Vec2 fan_direction(int index) {
  index %= kNumFanDirections;
  if (index < 0) index += kNumFanDirections;
  return table().dirs[index];
}

int snap_direction_index(const Vec2& dir) {
  const double a = std::atan2(dir.y(), dir.x());
  const double step = 2.0 * M_PI / kNumFanDirections;
  int idx = int(std::lround(a / step)) % kNumFanDirections;
  if (idx < 0) idx += kNumFanDirections;
  return idx;
}

LineSearchResult line_candidates(const ProbMap& pm, const Vec2& center,
                                 const Vec2& dir, int l_src,
                                 double threshold) {
  LineSearchResult res;
  const int half = (l_src - 1) / 2;
  const Rect local{0, 0, pm.roi.w, pm.roi.h};
  for (int k = -half; k <= half; ++k) {
    const Vec2 p = center + double(k) * dir;
    if (!local.contains_bilinear(p.x() - pm.roi.x, p.y() - pm.roi.y)) continue;
    const double g = direction_gradient(pm, p, dir);
    if (g <= threshold) continue;
    res.gradients.push_back(g);
    if (!res.best_point || g > res.best_gradient) {
      res.best_point = p;
      res.best_gradient = g;
    }
  }
  return res;
}

ContourCorrespondence fan_correspondence(const ProbMap& pm, const Vec2& x_cnt,
                                         const Vec2& n,
                                         const FanSearchParams& params) {
  ContourCorrespondence corr;
  corr.x_cnt = x_cnt;
  corr.n = n;

  const int n_sam =
      params.a_reg_deg > 0
          ? int(std::lround(params.a_reg_deg / params.a_int_deg)) + 1
          : 1;
  const int half = (n_sam - 1) / 2;
  const double base_angle = std::atan2(n.y(), n.x());
  const double step = 2.0 * M_PI / kNumFanDirections;
  const double a_int = params.a_int_deg * M_PI / 180.0;

  std::vector<double> s_values;
  s_values.reserve(size_t(n_sam));
  bool central_found = false;
  double central_sum = 0, central_max = 0;
  for (int j = -half; j <= half; ++j) {
    const double ang = base_angle + j * a_int;
    int idx = int(std::lround(ang / step)) % kNumFanDirections;
    if (idx < 0) idx += kNumFanDirections;
    const Vec2 dir = table().dirs[idx];
    const LineSearchResult line =
        line_candidates(pm, x_cnt, dir, params.l_src, params.candidate_threshold);
    if (line.best_point) s_values.push_back(n.dot(*line.best_point));
    if (j == 0 && line.best_point) {
      central_found = true;
      central_max = line.best_gradient;
      for (double g : line.gradients) central_sum += g;
    }
  }

  if (s_values.empty() || !central_found) return corr;  // invalid

  double mean = 0;
  for (double s : s_values) mean += s;
  mean /= double(s_values.size());
  double var = 0;
  for (double s : s_values) var += (s - mean) * (s - mean);
  var /= double(s_values.size());

  corr.mu = mean;
  corr.sigma_shp = std::sqrt(std::max(var, 1.0));
  corr.sigma_noi = central_sum / central_max;
  const double sigma2 = corr.sigma() * corr.sigma();
  corr.valid = sigma2 <= params.variance_cutoff;
  return corr;
}

double contour_residual(const ContourCorrespondence& corr) {
  if (!corr.valid) throw InvalidCorrespondence();
  return corr.n.dot(corr.x_cnt) - corr.mu;
}

MixtureParams fit_mixture_params(double a1, double a2) {
  if (a1 <= 0 || a2 <= 0) throw NonPositiveWeight();
  const double ratio = a1 / a2;
  MixtureParams p{};
  p.b1 = std::log1p(ratio);
  p.b2 = -std::log(std::log1p(ratio * std::exp(-0.5)) / p.b1);
  p.b3 = std::log(a2);
  return p;
}

double contour_weight(double r, double sigma_i, double beta) {
  return std::exp(-beta * r * r) / (sigma_i * sigma_i);
}

}  // namespace pft
