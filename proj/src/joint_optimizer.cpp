#include "pft/joint_optimizer.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "pft/errors.hpp"
#include "pft/tracker.hpp"

namespace pft {

namespace {

// 2x3 pinhole Jacobian d(pixel)/d(X_C).
Eigen::Matrix<double, 2, 3> projection_jacobian(const CameraIntrinsics& k,
                                                const Vec3& x_c) {
  const double z = x_c.z(), z2 = z * z;
  Eigen::Matrix<double, 2, 3> j;
  j << k.fx / z, 0, -k.fx * x_c.x() / z2, 0, k.fy / z, -k.fy * x_c.y() / z2;
  return j;
}

// 3x6 d X_C / d xi at xi = 0, twist layout [omega, v].
Eigen::Matrix<double, 3, 6> se3_point_jacobian(const Vec3& x_c) {
  Eigen::Matrix<double, 3, 6> j;
  j.leftCols<3>() = -skew(x_c);
  j.rightCols<3>() = Mat3::Identity();
  return j;
}

}  // namespace

Vec6 contour_jacobian(const ContourCorrespondence& corr, const Pose& t_cm,
                      const CameraIntrinsics& k) {
  const Vec3 x_c = t_cm.apply(corr.x_model);
  if (x_c.z() <= 1e-6) throw BehindCamera();
  const Eigen::Matrix<double, 1, 2> dr_dx = corr.n.transpose();
  return (dr_dx * projection_jacobian(k, x_c) * se3_point_jacobian(x_c))
      .transpose();
}

Vec6 interior_jacobian(const InteriorCorrespondence& corr, const Pose& t_cm,
                       const CameraIntrinsics& k) {
  const Vec3 x_c = t_cm.apply(corr.x_model);
  if (x_c.z() <= 1e-6) throw BehindCamera();
  const auto x = project_camera(k, x_c);
  const Vec2 delta = corr.x_in_prime - *x;
  const double r = delta.norm();
  if (r < 1e-12) return Vec6::Zero();  // residual at its minimum
  const Eigen::Matrix<double, 1, 2> dr_dx = -delta.transpose() / r;
  return (dr_dx * projection_jacobian(k, x_c) * se3_point_jacobian(x_c))
      .transpose();
}

NormalEquations accumulate(const std::vector<ContourCorrespondence>& contour,
                           const std::vector<InteriorCorrespondence>& interior,
                           double lambda, double beta, double gamma,
                           const Pose& t_cm, const CameraIntrinsics& k) {
  NormalEquations ne;
  for (const auto& c : contour) {
    if (!c.valid) continue;
    const Vec3 x_c = t_cm.apply(c.x_model);
    const auto x = project_camera(k, x_c);
    if (!x) continue;
    const double r = c.n.dot(*x) - c.mu;
    const double w = contour_weight(r, c.sigma(), beta);
    const Vec6 j =
        (c.n.transpose() * projection_jacobian(k, x_c) * se3_point_jacobian(x_c))
            .transpose();
    ne.g += lambda * 0.5 * w * j * r;
    ne.h += lambda * 0.5 * w * (j * j.transpose());
  }
  for (const auto& c : interior) {
    const Vec3 x_c = t_cm.apply(c.x_model);
    const auto x = project_camera(k, x_c);
    if (!x) continue;
    const double r = (c.x_in_prime - *x).norm();
    const double w = interior_weight(r, c.c_in, gamma);
    // Full 2D reprojection form: P^T e equals the norm-residual J^T r, and
    // P^T P keeps curvature in both image axes (the norm residual is a cone
    // at r = 0, where its rank-1 J^T J loses the orthogonal direction).
    const Eigen::Matrix<double, 2, 6> p =
        projection_jacobian(k, x_c) * se3_point_jacobian(x_c);
    const Vec2 e = *x - c.x_in_prime;
    ne.g += (1.0 - lambda) * 0.5 * w * (p.transpose() * e);
    ne.h += (1.0 - lambda) * 0.5 * w * (p.transpose() * p);
  }
  return ne;
}

Twist gn_step(const NormalEquations& ne, double lambda_r, double lambda_t) {
  Mat6 a = ne.h;
  for (int i = 0; i < 3; ++i) a(i, i) += lambda_r;
  for (int i = 3; i < 6; ++i) a(i, i) += lambda_t;
  const Eigen::LDLT<Mat6> ldlt(a);
  if (ldlt.info() != Eigen::Success) throw SingularSystem();
  const Vec6 dxi = ldlt.solve(-ne.g);
  if (!dxi.allFinite()) throw SingularSystem();
  return Twist::from_vector(dxi);
}

namespace {

struct FrozenWeights {
  std::vector<double> w_cnt;
  std::vector<double> w_in;
};

double joint_energy(const std::vector<ContourCorrespondence>& contour,
                    const std::vector<InteriorCorrespondence>& interior,
                    const FrozenWeights& w, double lambda, const Pose& t_cm,
                    const CameraIntrinsics& k) {
  double e = 0;
  size_t wi = 0;
  for (const auto& c : contour) {
    if (!c.valid) continue;
    const auto x = project(k, t_cm, c.x_model);
    const double weight = w.w_cnt[wi++];
    if (!x) continue;
    const double r = c.n.dot(*x) - c.mu;
    e += lambda * 0.5 * weight * r * r;
  }
  wi = 0;
  for (const auto& c : interior) {
    const auto x = project(k, t_cm, c.x_model);
    const double weight = w.w_in[wi++];
    if (!x) continue;
    const double r = (c.x_in_prime - *x).norm();
    e += (1.0 - lambda) * 0.5 * weight * r * r;
  }
  return e;
}

FrozenWeights freeze_weights(const std::vector<ContourCorrespondence>& contour,
                             const std::vector<InteriorCorrespondence>& interior,
                             double beta, double gamma, const Pose& t_cm,
                             const CameraIntrinsics& k) {
  FrozenWeights w;
  for (const auto& c : contour) {
    if (!c.valid) continue;
    const auto x = project(k, t_cm, c.x_model);
    const double r = x ? c.n.dot(*x) - c.mu : 0.0;
    w.w_cnt.push_back(contour_weight(r, c.sigma(), beta));
  }
  for (const auto& c : interior) {
    const auto x = project(k, t_cm, c.x_model);
    const double r = x ? (c.x_in_prime - *x).norm() : 0.0;
    w.w_in.push_back(interior_weight(r, c.c_in, gamma));
  }
  return w;
}

// Contour correspondences for the closest view under the given pose.
std::vector<ContourCorrespondence> search_contour(
    const ViewpointModel& model, const Pose& pose, const CameraIntrinsics& k,
    const ProbMap& pm, const FanSearchParams& fan) {
  const auto& tpl = model.views[closest_view(model, pose)];
  std::vector<ContourCorrespondence> out;
  out.reserve(tpl.contour_points.size());
  for (const auto& cp : tpl.contour_points) {
    const Vec3 x_m = cp.x.cast<double>();
    const Vec3 x_c = pose.apply(x_m);
    const auto x = project_camera(k, x_c);
    if (!x) continue;
    if (!pm.roi.contains_bilinear(x->x(), x->y())) continue;
    const Vec3 n_c = pose.R * cp.n.cast<double>();
    Vec2 n2(n_c.x(), n_c.y());
    const double nn = n2.norm();
    if (nn < 1e-6) continue;  // normal degenerate under this view
    n2 /= nn;
    ContourCorrespondence corr = fan_correspondence(pm, *x, n2, fan);
    corr.x_model = x_m;
    out.push_back(corr);
  }
  return out;
}

}  // namespace

Pose optimize_frame(const TrackerState& state, const ImageRgb& image,
                    const ViewpointModel& model, const TrackerConfig& config,
                    OptimizeTrace* trace) {
  const Rect roi = state.roi;
  const CameraIntrinsics& k = state.intrinsics;
  const ProbMap pm = probability_map(image, roi, state.color_model);
  const ImageU8 cur_gray = to_grayscale(crop(image, roi));

  // Flow and interior correspondences (with confidences) once per frame.
  std::vector<InteriorCorrespondence> interior;
  if (config.use_interior) {
    try {
      const FlowField flow =
          compute_flow(state.prev_gray, cur_gray, roi, config.flow);
      const auto& tpl = model.views[closest_view(model, state.pose)];
      interior = interior_correspondences(tpl.interior_points, state.pose, k,
                                          flow, state.prev_gray, cur_gray);
    } catch (const RoiTooSmall&) {
      // ROI too small for flow patches: contour modality only this frame.
    }
  }

  Pose pose = state.pose;
  size_t last_stage_valid = 0;
  for (const OptimizerStage& stage : config.schedule.stages) {
    FanSearchParams fan = config.fan;
    fan.a_reg_deg = stage.a_reg_deg;
    fan.l_src = stage.l_src;
    fan.variance_cutoff = config.variance_cutoff;
    const double beta = config.schedule.b2 / (stage.sigma_sched * stage.sigma_sched);
    const double lambda = config.use_interior ? stage.lambda : 1.0;

    for (int m = 0; m < stage.search_iters; ++m) {
      const auto contour = search_contour(model, pose, k, pm, fan);
      if (&stage == &config.schedule.stages.back()) {
        last_stage_valid = 0;
        for (const auto& c : contour) last_stage_valid += c.valid ? 1 : 0;
      }
      for (int n = 0; n < config.schedule.gn_iters_per_search; ++n) {
        FrozenWeights frozen;
        double e_before = 0;
        if (trace) {
          frozen = freeze_weights(contour, interior, beta, stage.gamma, pose, k);
          e_before = joint_energy(contour, interior, frozen, lambda, pose, k);
        }
        const NormalEquations ne =
            accumulate(contour, interior, lambda, beta, stage.gamma, pose, k);
        const Twist dxi =
            gn_step(ne, config.schedule.lambda_r, config.schedule.lambda_t);
        pose = compose(exp_se3(dxi), pose);
        if (trace)
          trace->iterations.push_back(
              {e_before,
               joint_energy(contour, interior, frozen, lambda, pose, k)});
      }
    }
  }

  if (trace) trace->final_valid_contours = last_stage_valid;
  if (int(last_stage_valid) < config.min_valid_contours)
    throw LostTrack("only " + std::to_string(last_stage_valid) +
                    " valid contour correspondences in the final stage");
  return pose;
}

}  // namespace pft
