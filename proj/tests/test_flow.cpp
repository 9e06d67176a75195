#include <doctest.h>

#include <algorithm>
#include <random>

#include "pft/errors.hpp"
#include "pft/interior_flow.hpp"
#include "support/scenes.hpp"

using namespace pft;

namespace {

double median_endpoint_error(const FlowField& flow, double dx, double dy,
                             int margin) {
  std::vector<double> errs;
  for (int y = margin; y < flow.roi.h - margin; ++y)
    for (int x = margin; x < flow.roi.w - margin; ++x) {
      const double ex = flow.u_x.at(x, y) - dx;
      const double ey = flow.u_y.at(x, y) - dy;
      errs.push_back(std::hypot(ex, ey));
    }
  std::nth_element(errs.begin(), errs.begin() + long(errs.size() / 2), errs.end());
  return errs[errs.size() / 2];
}

}  // namespace

TEST_CASE("identical frames produce (exactly) zero flow") {
  const ImageU8 img = testing::make_texture(96, 80, 5);
  const FlowField flow = compute_flow(img, img, {0, 0, 96, 80}, {});
  float max_mag = 0;
  for (int y = 0; y < 80; ++y)
    for (int x = 0; x < 96; ++x)
      max_mag = std::max(max_mag, std::abs(flow.u_x.at(x, y)) +
                                      std::abs(flow.u_y.at(x, y)));
  CHECK(max_mag <= 0.1f);
}

TEST_CASE("integer shifts are recovered") {
  const ImageU8 prev = testing::make_texture(160, 160, 11);
  const ImageU8 cur = testing::shift_image(prev, 3, 0);
  const FlowField flow = compute_flow(prev, cur, {0, 0, 160, 160}, {});
  CHECK(median_endpoint_error(flow, 3, 0, 16) < 0.5);
}

TEST_CASE("subpixel shifts are recovered") {
  const ImageU8 prev = testing::make_texture(160, 160, 13);
  const ImageU8 cur = testing::shift_image(prev, 1.5, -0.5);
  const FlowField flow = compute_flow(prev, cur, {0, 0, 160, 160}, {});
  CHECK(median_endpoint_error(flow, 1.5, -0.5, 16) < 0.5);
}

TEST_CASE("flow works on roi crops of full frames") {
  const ImageU8 prev = testing::make_texture(320, 240, 17);
  const ImageU8 cur = testing::shift_image(prev, -2, 1);
  const Rect roi{80, 60, 160, 120};
  const FlowField flow = compute_flow(prev, cur, roi, {});
  CHECK(flow.roi.w == 160);
  CHECK(median_endpoint_error(flow, -2, 1, 16) < 0.5);
  // Image-coordinate sampling maps into the roi.
  const Vec2 u = flow.sample(Vec2(160, 120));
  CHECK(u.x() == doctest::Approx(-2).epsilon(0.3));
  CHECK(u.y() == doctest::Approx(1).epsilon(0.3));
}

TEST_CASE("flow is equivariant under common translation") {
  const ImageU8 prev_full = testing::make_texture(200, 180, 23);
  const ImageU8 cur_full = testing::shift_image(prev_full, 2.5, -1.5);
  const Rect a{20, 20, 144, 128};
  const Rect b{28, 24, 144, 128};  // both images shifted by (8, 4)
  const FlowField fa = compute_flow(prev_full, cur_full, a, {});
  const FlowField fb = compute_flow(prev_full, cur_full, b, {});
  // Compare over the common interior, away from patch-grid borders.
  double worst = 0;
  for (int y = 40; y < 100; ++y)
    for (int x = 40; x < 110; ++x) {
      const Vec2 ua = fa.sample(Vec2(a.x + x, a.y + y));
      const Vec2 ub = fb.sample(Vec2(a.x + x, a.y + y));
      worst = std::max(worst, (ua - ub).lpNorm<Eigen::Infinity>());
    }
  CHECK(worst <= 0.25);
}

TEST_CASE("tiny rois raise RoiTooSmall") {
  const ImageU8 img = testing::make_texture(40, 40, 3);
  FlowParams params;  // 3 levels: coarsest is roi/16
  CHECK_THROWS_AS(compute_flow(img, img, {0, 0, 40, 40}, params), RoiTooSmall);
}

TEST_CASE("densification flag selects the interpolation path") {
  const ImageU8 prev = testing::make_texture(160, 160, 29);
  const ImageU8 cur = testing::shift_image(prev, 2, 2);
  FlowParams sparse;
  sparse.densification = false;
  const FlowField flow = compute_flow(prev, cur, {0, 0, 160, 160}, sparse);
  CHECK(median_endpoint_error(flow, 2, 2, 16) < 0.5);
}

TEST_CASE("interior correspondences follow the flow field") {
  FlowField flow;
  flow.roi = {0, 0, 64, 64};
  flow.u_x = ImageF(64, 64, 0.f);
  flow.u_y = ImageF(64, 64, 0.f);

  const CameraIntrinsics k{100, 100, 32, 32};
  std::vector<Eigen::Vector3f> points;
  std::mt19937 rng(9);
  for (int i = 0; i < 300; ++i)
    points.emplace_back(0.2f * float(uniform_sample(rng) - 0.5),
                        0.2f * float(uniform_sample(rng) - 0.5), 0.f);
  Pose pose;
  pose.t = Vec3(0, 0, 1);

  SUBCASE("zero flow keeps targets at the projections") {
    const auto corrs = interior_correspondences(points, pose, k, flow);
    CHECK(!corrs.empty());
    for (const auto& c : corrs) {
      CHECK((c.x_in_prime - c.x_in).norm() == doctest::Approx(0));
      CHECK(c.c_in == doctest::Approx(1.0));
    }
  }
  SUBCASE("uniform flow displaces every target identically") {
    for (auto& v : flow.u_x.data()) v = 3.f;
    const auto corrs = interior_correspondences(points, pose, k, flow);
    CHECK(!corrs.empty());
    for (const auto& c : corrs) {
      CHECK((c.x_in_prime - c.x_in - Vec2(3, 0)).norm() ==
            doctest::Approx(0).epsilon(1e-6));
    }
  }
  SUBCASE("points projecting outside the roi are dropped") {
    points.emplace_back(10.f, 0.f, 0.f);  // far off screen
    const auto corrs = interior_correspondences(points, pose, k, flow);
    CHECK(corrs.size() <= points.size() - 1);
  }
}

TEST_CASE("correspondence count never exceeds the template size") {
  FlowField flow;
  flow.roi = {0, 0, 64, 64};
  flow.u_x = ImageF(64, 64, 0.f);
  flow.u_y = ImageF(64, 64, 0.f);
  const CameraIntrinsics k{100, 100, 32, 32};
  std::vector<Eigen::Vector3f> points(200, Eigen::Vector3f(0, 0, 0));
  Pose pose;
  pose.t = Vec3(0, 0, 1);
  CHECK(interior_correspondences(points, pose, k, flow).size() <= 200);
}

TEST_CASE("confidence from error follows max(1 - e^2, 0)") {
  CHECK(confidence_from_error(0) == doctest::Approx(1.0));
  CHECK(confidence_from_error(1) == doctest::Approx(0.0));
  CHECK(confidence_from_error(0.5) == doctest::Approx(0.75));
  CHECK(confidence_from_error(2.0) == doctest::Approx(0.0));
}

TEST_CASE("identical images with zero flow give unit confidence") {
  const ImageU8 img = testing::make_texture(64, 64, 41);
  FlowField flow;
  flow.roi = {0, 0, 64, 64};
  flow.u_x = ImageF(64, 64, 0.f);
  flow.u_y = ImageF(64, 64, 0.f);
  CHECK(flow_confidence(img, img, flow, Vec2(32, 32)) == doctest::Approx(1.0));
}

TEST_CASE("confidence decreases with intensity mismatch and rough flow") {
  const ImageU8 prev = testing::make_texture(64, 64, 43);
  ImageU8 brighter = prev;
  for (auto& v : brighter.data())
    v = uint8_t(std::min(255, int(v) + 60));
  FlowField flow;
  flow.roi = {0, 0, 64, 64};
  flow.u_x = ImageF(64, 64, 0.f);
  flow.u_y = ImageF(64, 64, 0.f);

  const double c_same = flow_confidence(prev, prev, flow, Vec2(32, 32));
  const double c_bright = flow_confidence(prev, brighter, flow, Vec2(32, 32));
  CHECK(c_bright < c_same);

  // Rough flow adds smoothness error on identical images.
  std::mt19937 rng(77);
  for (auto& v : flow.u_x.data()) v = float(4.0 * (uniform_sample(rng) - 0.5));
  for (auto& v : flow.u_y.data()) v = float(4.0 * (uniform_sample(rng) - 0.5));
  const double c_rough = flow_confidence(prev, prev, flow, Vec2(32, 32));
  CHECK(c_rough < c_same);
}

TEST_CASE("patches straddling the roi border throw") {
  const ImageU8 img = testing::make_texture(32, 32, 47);
  FlowField flow;
  flow.roi = {0, 0, 32, 32};
  flow.u_x = ImageF(32, 32, 0.f);
  flow.u_y = ImageF(32, 32, 0.f);
  CHECK_THROWS_AS(flow_confidence(img, img, flow, Vec2(1, 16)), PatchOutOfBounds);
  CHECK_THROWS_AS(flow_confidence(img, img, flow, Vec2(16, 30.6)), PatchOutOfBounds);
}

TEST_CASE("interior weight worked examples and range") {
  CHECK(interior_weight(0, 0.8, 0.5) == doctest::Approx(0.8));
  CHECK(interior_weight(1, 1.0, 0.5) == doctest::Approx(std::exp(-0.5)).epsilon(1e-9));
  CHECK(interior_weight(1, 1.0, 0.5) == doctest::Approx(0.6065).epsilon(1e-4));
  std::mt19937 rng(51);
  for (int i = 0; i < 200; ++i) {
    const double r = 10.0 * uniform_sample(rng);
    const double c = uniform_sample(rng);
    const double gamma = 3.0 * uniform_sample(rng);
    const double w = interior_weight(r, c, gamma);
    CHECK(w >= 0);
    CHECK(w <= c + 1e-12);
    if (r > 1e-9 && gamma > 1e-9 && c > 1e-9) CHECK(w < c);
  }
}
