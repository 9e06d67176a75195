#include "pft/geometry.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "pft/errors.hpp"

namespace pft {

double Pose::orthonormality_drift() const {
  return (R.transpose() * R - Mat3::Identity()).norm();
}

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return s;
}

Pose exp_se3(const Twist& xi) {
  const Vec3& w = xi.omega;
  const double theta = w.norm();
  const Mat3 wx = skew(w);
  Mat3 rot, v_mat;
  if (theta < 1e-8) {
    // Second-order series in theta; exact enough at this magnitude.
    rot = Mat3::Identity() + wx + 0.5 * wx * wx;
    v_mat = Mat3::Identity() + 0.5 * wx + (1.0 / 6.0) * wx * wx;
  } else {
    const double s = std::sin(theta), c = std::cos(theta);
    const double t2 = theta * theta;
    rot = Mat3::Identity() + (s / theta) * wx + ((1 - c) / t2) * wx * wx;
    v_mat = Mat3::Identity() + ((1 - c) / t2) * wx +
            ((theta - s) / (t2 * theta)) * wx * wx;
  }
  return {rot, v_mat * xi.v};
}

Mat3 orthonormalize(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0) {
    Mat3 flip = Mat3::Identity();
    flip(2, 2) = -1;
    r = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  return r;
}

Pose compose(const Pose& delta, const Pose& prev) {
  Pose out{delta.R * prev.R, delta.R * prev.t + delta.t};
  if (out.orthonormality_drift() > 1e-9) out.R = orthonormalize(out.R);
  return out;
}

std::optional<Vec2> project_camera(const CameraIntrinsics& k, const Vec3& x_c) {
  if (x_c.z() <= 1e-6) return std::nullopt;
  return Vec2(k.fx * x_c.x() / x_c.z() + k.cx,
              k.fy * x_c.y() / x_c.z() + k.cy);
}

std::optional<Vec2> project(const CameraIntrinsics& k, const Pose& t_cm,
                            const Vec3& x_m) {
  return project_camera(k, t_cm.apply(x_m));
}

Vec3 backproject(const CameraIntrinsics& k, const Vec2& x, double d) {
  if (d <= 0) throw NonPositiveDepth();
  return Vec3((x.x() - k.cx) / k.fx * d, (x.y() - k.cy) / k.fy * d, d);
}

PoseError pose_errors(const Pose& t, const Pose& t_gt) {
  PoseError e;
  e.e_t = (t.t - t_gt.t).norm();
  double arg = ((t.R.transpose() * t_gt.R).trace() - 1.0) / 2.0;
  arg = std::clamp(arg, -1.0, 1.0);
  e.e_r = std::acos(arg);
  return e;
}

Pose relative_target_pose(const Pose& t_wc, const Pose& t_cm,
                          const Pose& t_wt) {
  const Pose wm{t_wc.R * t_cm.R, t_wc.R * t_cm.t + t_wc.t};
  const Pose inv = wm.inverse();
  return {inv.R * t_wt.R, inv.R * t_wt.t + inv.t};
}

}  // namespace pft
