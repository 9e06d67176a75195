#include <doctest.h>

#include <random>

#include "pft/errors.hpp"
#include "pft/geometry.hpp"

using namespace pft;

namespace {

// Independent Rodrigues evaluation for the exp oracle.
Mat3 rodrigues(const Vec3& axis_angle) {
  const double theta = axis_angle.norm();
  if (theta == 0) return Mat3::Identity();
  const Vec3 a = axis_angle / theta;
  Mat3 k;
  k << 0, -a.z(), a.y(), a.z(), 0, -a.x(), -a.y(), a.x(), 0;
  return Mat3::Identity() + std::sin(theta) * k + (1 - std::cos(theta)) * k * k;
}

Twist random_twist(std::mt19937& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Twist xi;
  xi.omega = Vec3(u(rng), u(rng), u(rng));
  xi.v = Vec3(u(rng), u(rng), u(rng));
  return xi;
}

}  // namespace

TEST_CASE("exp of zero twist is the identity") {
  const Pose p = exp_se3(Twist{});
  CHECK((p.R - Mat3::Identity()).norm() == doctest::Approx(0).epsilon(1e-15));
  CHECK(p.t.norm() == doctest::Approx(0));
}

TEST_CASE("pure translation leaves rotation at identity") {
  Twist xi;
  xi.v = Vec3(0.1, 0, 0);
  const Pose p = exp_se3(xi);
  CHECK((p.R - Mat3::Identity()).norm() < 1e-15);
  CHECK(p.t.isApprox(Vec3(0.1, 0, 0), 1e-15));
}

TEST_CASE("quarter-turn about z matches Rodrigues") {
  Twist xi;
  xi.omega = Vec3(0, 0, M_PI / 2);
  const Pose p = exp_se3(xi);
  const Mat3 expected = rodrigues(xi.omega);
  CHECK((p.R - expected).norm() < 1e-12);
  Mat3 hand;
  hand << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  CHECK((p.R - hand).norm() < 1e-12);
  CHECK(p.t.norm() < 1e-15);
}

TEST_CASE("exp inverse composes to the identity for |xi| <= 1") {
  std::mt19937 rng(17);
  for (int i = 0; i < 200; ++i) {
    const Twist xi = random_twist(rng, 0.4);
    Twist neg;
    neg.omega = -xi.omega;
    neg.v = -xi.v;
    const Pose p = compose(exp_se3(xi), exp_se3(neg));
    CHECK((p.R - Mat3::Identity()).norm() < 1e-9);
    CHECK(p.t.norm() < 1e-9);
  }
}

TEST_CASE("small-angle branch stays finite and accurate") {
  Twist xi;
  xi.omega = Vec3(1e-9, -2e-9, 5e-10);
  xi.v = Vec3(0.01, 0.02, -0.03);
  const Pose p = exp_se3(xi);
  CHECK(p.orthonormality_drift() < 1e-12);
  CHECK(p.t.isApprox(xi.v, 1e-8));
}

TEST_CASE("compose identities") {
  std::mt19937 rng(3);
  const Pose t = exp_se3(random_twist(rng, 0.5));
  const Pose id;
  CHECK((compose(id, t).R - t.R).norm() < 1e-15);
  CHECK((compose(t, id).R - t.R).norm() < 1e-15);
  CHECK((compose(id, t).t - t.t).norm() < 1e-15);
  CHECK((compose(t, id).t - t.t).norm() < 1e-15);
}

TEST_CASE("compose round-trips through a delta and its inverse") {
  std::mt19937 rng(11);
  for (int i = 0; i < 100; ++i) {
    const Pose t = exp_se3(random_twist(rng, 0.8));
    const Twist xi = random_twist(rng, 0.5);
    Twist neg;
    neg.omega = -xi.omega;
    neg.v = -xi.v;
    const Pose round = compose(exp_se3(xi), compose(exp_se3(neg), t));
    CHECK((round.R - t.R).norm() < 1e-9);
    CHECK((round.t - t.t).norm() < 1e-9);
  }
}

TEST_CASE("rotations stay orthonormal under long composition chains") {
  std::mt19937 rng(29);
  Pose t;
  for (int i = 0; i < 5000; ++i) t = compose(exp_se3(random_twist(rng, 0.1)), t);
  CHECK(t.orthonormality_drift() < 1e-9);
  CHECK(t.R.determinant() == doctest::Approx(1).epsilon(1e-9));
}

TEST_CASE("optical axis projects to the principal point") {
  const CameraIntrinsics k{600, 580, 320, 256};
  const auto p = project_camera(k, Vec3(0, 0, 1));
  REQUIRE(p.has_value());
  CHECK(p->x() == doctest::Approx(320));
  CHECK(p->y() == doctest::Approx(256));
}

TEST_CASE("projection by direct substitution") {
  const CameraIntrinsics k{600, 600, 320, 256};
  const auto p = project_camera(k, Vec3(0.1, 0, 1));
  REQUIRE(p.has_value());
  CHECK(p->x() == doctest::Approx(380));
}

TEST_CASE("points behind the camera do not project") {
  const CameraIntrinsics k{600, 600, 320, 256};
  CHECK(!project_camera(k, Vec3(0, 0, -1)).has_value());
  CHECK(!project_camera(k, Vec3(0.1, 0.1, 0)).has_value());
}

TEST_CASE("backproject basics") {
  const CameraIntrinsics k{600, 600, 320, 256};
  CHECK(backproject(k, Vec2(320, 256), 2.0).isApprox(Vec3(0, 0, 2.0), 1e-12));
  CHECK(backproject(k, Vec2(920, 256), 1.0).isApprox(Vec3(1, 0, 1), 1e-12));
  CHECK_THROWS_AS(backproject(k, Vec2(0, 0), 0.0), NonPositiveDepth);
  CHECK_THROWS_AS(backproject(k, Vec2(0, 0), -1.0), NonPositiveDepth);
}

TEST_CASE("project and backproject are mutually inverse") {
  const CameraIntrinsics k{615, 590, 317.5, 242.0};
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  for (int i = 0; i < 500; ++i) {
    const Vec3 x_c(u(rng), u(rng), 1.0 + std::abs(u(rng)) * 3);
    const auto px = project_camera(k, x_c);
    REQUIRE(px.has_value());
    const Vec3 back = backproject(k, *px, x_c.z());
    CHECK((back - x_c).norm() < 1e-9);
    const auto px2 = project_camera(k, back);
    REQUIRE(px2.has_value());
    CHECK((*px2 - *px).norm() < 1e-9);
  }
}

TEST_CASE("pose error of identical poses is zero") {
  std::mt19937 rng(5);
  const Pose t = exp_se3(random_twist(rng, 0.7));
  const PoseError e = pose_errors(t, t);
  CHECK(e.e_t == doctest::Approx(0));
  CHECK(e.e_r == doctest::Approx(0));
}

TEST_CASE("rotation error recovers a constructed angle") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 50; ++i) {
    const Vec3 axis = Vec3(u(rng), u(rng), u(rng)).normalized();
    Pose gt = exp_se3(random_twist(rng, 0.5));
    Pose t = gt;
    t.R = gt.R * rodrigues(0.3 * axis);
    const PoseError e = pose_errors(t, gt);
    CHECK(e.e_r == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(e.e_t == doctest::Approx(0));
  }
}

TEST_CASE("translation error is the euclidean distance") {
  Pose t, gt;
  t.t = Vec3(0.05, 0, 0);
  const PoseError e = pose_errors(t, gt);
  CHECK(e.e_t == doctest::Approx(0.05));
}

TEST_CASE("rotation error is symmetric in its arguments") {
  std::mt19937 rng(13);
  for (int i = 0; i < 100; ++i) {
    const Pose a = exp_se3(random_twist(rng, 1.0));
    const Pose b = exp_se3(random_twist(rng, 1.0));
    CHECK(pose_errors(a, b).e_r == doctest::Approx(pose_errors(b, a).e_r));
  }
}

TEST_CASE("pose error clamps the acos argument") {
  Pose t, gt;  // identical; trace can exceed 3 by rounding
  t.R = gt.R;
  const PoseError e = pose_errors(t, gt);
  CHECK(std::isfinite(e.e_r));
}

TEST_CASE("relative target pose identities") {
  const Pose id;
  const Pose r = relative_target_pose(id, id, id);
  CHECK((r.R - Mat3::Identity()).norm() < 1e-15);
  CHECK(r.t.norm() < 1e-15);

  std::mt19937 rng(19);
  const Pose t_wc = exp_se3(random_twist(rng, 0.6));
  const Pose t_cm = exp_se3(random_twist(rng, 0.6));
  const Pose t_wt = compose(t_wc, t_cm);
  const Pose rel = relative_target_pose(t_wc, t_cm, t_wt);
  CHECK((rel.R - Mat3::Identity()).norm() < 1e-9);
  CHECK(rel.t.norm() < 1e-9);
}

TEST_CASE("relative target pose round-trips algebraically") {
  std::mt19937 rng(23);
  for (int i = 0; i < 100; ++i) {
    const Pose t_wc = exp_se3(random_twist(rng, 0.8));
    const Pose t_cm = exp_se3(random_twist(rng, 0.8));
    const Pose t_wt = exp_se3(random_twist(rng, 0.8));
    const Pose rel = relative_target_pose(t_wc, t_cm, t_wt);
    const Pose recovered = compose(compose(t_wc, t_cm), rel);
    CHECK((recovered.R - t_wt.R).norm() < 1e-9);
    CHECK((recovered.t - t_wt.t).norm() < 1e-9);
  }
}
