#ifndef PFT_JOINT_OPTIMIZER_HPP
#define PFT_JOINT_OPTIMIZER_HPP

#include <array>
#include <vector>

#include "pft/contour_modality.hpp"
#include "pft/geometry.hpp"
#include "pft/image.hpp"
#include "pft/interior_flow.hpp"
#include "pft/viewpoint_model.hpp"

namespace pft {

struct TrackerState;
struct TrackerConfig;

// One coarse-to-fine stage of the optimization schedule.
struct OptimizerStage {
  double a_reg_deg;    // fan range
  int l_src;           // search line length, pixels
  double sigma_sched;  // empirical sigma in the exponential weight, pixels
  double gamma;        // interior weight falloff, 1/px^2
  double lambda;       // contour share of the joint energy, in [0, 1]
  int search_iters;    // correspondence searches in this stage (the k loop)
};

struct OptimizerSchedule {
  std::array<OptimizerStage, 4> stages{
      OptimizerStage{60, 73, 8, 0.1, 0.4, 1},
      OptimizerStage{40, 43, 4, 0.5, 0.6, 2},
      OptimizerStage{20, 23, 2, 1.5, 0.8, 2},
      OptimizerStage{0, 13, 1, 2.5, 0.9, 4},
  };
  int gn_iters_per_search = 3;
  double b2 = 0.2;
  double lambda_r = 5000;
  double lambda_t = 500000;
};

struct NormalEquations {
  Mat6 h = Mat6::Zero();
  Vec6 g = Vec6::Zero();
};

// d r_cnt / d xi for a contour correspondence; residual is measured along the
// frozen image normal.  Throws BehindCamera.
Vec6 contour_jacobian(const ContourCorrespondence& corr, const Pose& t_cm,
                      const CameraIntrinsics& k);

// d r_in / d xi for an interior correspondence; zero at r_in = 0.
// Throws BehindCamera.
Vec6 interior_jacobian(const InteriorCorrespondence& corr, const Pose& t_cm,
                       const CameraIntrinsics& k);

// Weighted Gauss-Newton accumulation of both modalities (Eqs. with the 1/2
// factors kept; they cancel in the solve).  beta = b2 / sigma_sched^2.
NormalEquations accumulate(const std::vector<ContourCorrespondence>& contour,
                           const std::vector<InteriorCorrespondence>& interior,
                           double lambda, double beta, double gamma,
                           const Pose& t_cm, const CameraIntrinsics& k);

// Solves (H + diag(lambda_r I3, lambda_t I3)) dxi = -g.
Twist gn_step(const NormalEquations& ne, double lambda_r, double lambda_t);

// Per-iteration energies with weights frozen at iteration start; before is
// evaluated at the incoming pose, after at the updated pose.
struct OptimizeTrace {
  struct GnIteration {
    double energy_before;
    double energy_after;
  };
  std::vector<GnIteration> iterations;
  size_t final_valid_contours = 0;
};

// Full per-frame joint optimization (probability map, flow, coarse-to-fine
// correspondence search, weighted Gauss-Newton updates).  Does not mutate the
// state; model updates happen in track().  Throws LostTrack when fewer than
// 10 valid contour correspondences survive in the final stage.
Pose optimize_frame(const TrackerState& state, const ImageRgb& image,
                    const ViewpointModel& model, const TrackerConfig& config,
                    OptimizeTrace* trace = nullptr);

}  // namespace pft

#endif  // PFT_JOINT_OPTIMIZER_HPP
