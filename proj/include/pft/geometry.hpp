#ifndef PFT_GEOMETRY_HPP
#define PFT_GEOMETRY_HPP

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <optional>

namespace pft {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

// Rigid transform T = [R | t], mapping model coordinates into camera
// coordinates (meters).  R stays orthonormal; compose() re-orthonormalizes
// when accumulated drift exceeds 1e-9.
struct Pose {
  Mat3 R = Mat3::Identity();
  Vec3 t = Vec3::Zero();

  static Pose identity() { return {}; }

  Vec3 apply(const Vec3& x_m) const { return R * x_m + t; }
  Pose inverse() const { return {R.transpose(), -(R.transpose() * t)}; }

  // Frobenius distance of R^T R from the identity.
  double orthonormality_drift() const;
};

// se(3) increment, layout xi = [w1, w2, w3, v1, v2, v3].
struct Twist {
  Vec3 omega = Vec3::Zero();  // radians
  Vec3 v = Vec3::Zero();      // meters

  static Twist from_vector(const Vec6& xi) {
    return {xi.head<3>(), xi.tail<3>()};
  }
  Vec6 to_vector() const {
    Vec6 xi;
    xi << omega, v;
    return xi;
  }
};

struct CameraIntrinsics {
  double fx = 0, fy = 0;  // pixels
  double cx = 0, cy = 0;  // pixels
};

struct PoseError {
  double e_t = 0;  // meters
  double e_r = 0;  // radians, in [0, pi]
};

Mat3 skew(const Vec3& v);

// exp of the 4x4 hat of xi.  Rodrigues rotation; series expansion below
// |omega| = 1e-8 keeps the V matrix finite.
Pose exp_se3(const Twist& xi);

// delta * prev, re-orthonormalized when drift exceeds 1e-9.
Pose compose(const Pose& delta, const Pose& prev);

// Nearest rotation matrix in Frobenius norm (polar decomposition).
Mat3 orthonormalize(const Mat3& m);

// Pinhole projection of a model point.  Empty when the transformed point has
// Z_C <= 1e-6 (behind or on the camera plane).
std::optional<Vec2> project(const CameraIntrinsics& k, const Pose& t_cm,
                            const Vec3& x_m);

// Projection of a camera-frame point, same validity rule.
std::optional<Vec2> project_camera(const CameraIntrinsics& k, const Vec3& x_c);

// Camera-frame point at depth d re-projecting exactly onto pixel x.
// Throws NonPositiveDepth.
Vec3 backproject(const CameraIntrinsics& k, const Vec2& x, double d);

// Translation / rotation error between two poses; the acos argument is
// clamped to [-1, 1].
PoseError pose_errors(const Pose& t, const Pose& t_gt);

// (T_WC * T_CM)^-1 * T_WT: pose of a world-space target relative to the
// tracked object.
Pose relative_target_pose(const Pose& t_wc, const Pose& t_cm,
                          const Pose& t_wt);

}  // namespace pft

#endif  // PFT_GEOMETRY_HPP
