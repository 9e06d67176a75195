#ifndef PFT_CONTOUR_MODALITY_HPP
#define PFT_CONTOUR_MODALITY_HPP

#include <optional>
#include <vector>

#include "pft/color_segmentation.hpp"
#include "pft/geometry.hpp"

namespace pft {

// One projected contour point with its searched 1D correspondence
// distribution along the image normal.
struct ContourCorrespondence {
  Vec2 x_cnt = Vec2::Zero();   // projected contour point, pixels
  Vec2 n = Vec2::Zero();       // image normal, unit
  double mu = 0;               // distribution mean on the n^T x axis, pixels
  double sigma_shp = 1;        // shape uncertainty, pixels, >= 1
  double sigma_noi = 1;        // noise uncertainty, unitless, >= 1
  Vec3 x_model = Vec3::Zero(); // source 3D point, model frame
  bool valid = false;

  double sigma() const { return sigma_shp * sigma_noi; }
};

struct FanSearchParams {
  double a_int_deg = 10;       // sampling interval between fan lines
  double a_reg_deg = 60;       // total fan range (2 * theta_max)
  int l_src = 73;              // search line length, odd, pixels
  double candidate_threshold = 0;  // direction gradient must exceed this
  double variance_cutoff = 600;    // discard when (sigma_shp*sigma_noi)^2 > this
};

// Precomputed 36-entry direction table covering 360 degrees; fan directions
// snap to its entries.
inline constexpr int kNumFanDirections = 36;
Vec2 fan_direction(int index);
int snap_direction_index(const Vec2& dir);

struct LineSearchResult {
  std::optional<Vec2> best_point;
  double best_gradient = 0;
  std::vector<double> gradients;  // every candidate's gradient on the line
};

// Samples l_src integer steps centered on `center` along `dir`; candidates
// are samples with direction gradient above the threshold.  Samples falling
// outside the ROI are skipped.
LineSearchResult line_candidates(const ProbMap& pm, const Vec2& center,
                                 const Vec2& dir, int l_src,
                                 double threshold = 0);

// Fan-shaped point-to-distribution correspondence search around the normal.
// x_model is left zero; callers fill it.
ContourCorrespondence fan_correspondence(const ProbMap& pm, const Vec2& x_cnt,
                                         const Vec2& n,
                                         const FanSearchParams& params);

// n^T x_cnt - mu.  Throws InvalidCorrespondence.
double contour_residual(const ContourCorrespondence& corr);

struct MixtureParams {
  double b1, b2, b3;
};

// Closed-form fit of b1*exp(-(b2/sigma^2) r^2) + b3 to the log of the
// Gaussian-plus-uniform mixture a1*exp(-r^2/(2 sigma^2)) + a2; exact at r = 0,
// r = sigma and r -> inf.  Throws NonPositiveWeight.
MixtureParams fit_mixture_params(double a1, double a2);

// (1/sigma_i^2) * exp(-beta * r^2).
double contour_weight(double r, double sigma_i, double beta);

}  // namespace pft

#endif  // PFT_CONTOUR_MODALITY_HPP
