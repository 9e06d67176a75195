#include <doctest.h>

#include <random>

#include "pft/color_segmentation.hpp"
#include "pft/errors.hpp"

using namespace pft;

namespace {

Mask full_mask(int w, int h, uint8_t value) {
  Mask m;
  m.fg = Image<uint8_t>(w, h, value);
  return m;
}

// Left half foreground.
Mask half_mask(int w, int h) {
  Mask m;
  m.fg = Image<uint8_t>(w, h, 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w / 2; ++x) m.fg.at(x, y) = 1;
  return m;
}

double hist_sum(const std::vector<float>& h) {
  double s = 0;
  for (float v : h) s += v;
  return s;
}

}  // namespace

TEST_CASE("unit learn rate concentrates a uniform red foreground") {
  ImageRgb img(16, 8, Rgb8{250, 10, 10});  // everything red
  for (int y = 0; y < 8; ++y)
    for (int x = 8; x < 16; ++x) img.at(x, y) = {10, 10, 250};  // blue right

  ColorModel model(32);
  model.learn_rate_f = 1.f;
  model.learn_rate_b = 1.f;
  REQUIRE(update_color_model(model, img, half_mask(16, 8), {0, 0, 16, 8}));
  const size_t red_cell = model.cell({250, 10, 10});
  CHECK(model.hist_f[red_cell] == doctest::Approx(1.0));
  const size_t blue_cell = model.cell({10, 10, 250});
  CHECK(model.hist_b[blue_cell] == doctest::Approx(1.0));
}

TEST_CASE("zero learn rate leaves the model unchanged") {
  ImageRgb img(16, 8, Rgb8{100, 150, 200});
  ColorModel model(32);
  model.hist_f[5] = 1.f;
  model.hist_b[9] = 1.f;
  model.learn_rate_f = 0.f;
  model.learn_rate_b = 0.f;
  const ColorModel before = model;
  REQUIRE(update_color_model(model, img, half_mask(16, 8), {0, 0, 16, 8}));
  CHECK(model.hist_f == before.hist_f);
  CHECK(model.hist_b == before.hist_b);
}

TEST_CASE("two half-rate updates blend toward the instantaneous histogram") {
  ImageRgb img(16, 8, Rgb8{250, 10, 10});
  for (int y = 0; y < 8; ++y)
    for (int x = 8; x < 16; ++x) img.at(x, y) = {10, 10, 250};

  ColorModel model(32);
  // Start from a different color's cell.
  const size_t start_f = model.cell({10, 250, 10});
  model.hist_f[start_f] = 1.f;
  model.hist_b[model.cell({250, 250, 250})] = 1.f;
  model.learn_rate_f = 0.5f;
  model.learn_rate_b = 0.5f;

  REQUIRE(update_color_model(model, img, half_mask(16, 8), {0, 0, 16, 8}));
  REQUIRE(update_color_model(model, img, half_mask(16, 8), {0, 0, 16, 8}));
  // h = 0.25 h0 + 0.75 h_inst on a constant scene.
  CHECK(model.hist_f[start_f] == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(model.hist_f[model.cell({250, 10, 10})] ==
        doctest::Approx(0.75).epsilon(1e-6));
}

TEST_CASE("empty regions leave the model unchanged and report failure") {
  ImageRgb img(8, 8, Rgb8{50, 60, 70});
  ColorModel model(32);
  model.hist_f[3] = 1.f;
  const ColorModel before = model;
  CHECK(!update_color_model(model, img, full_mask(8, 8, 0), {0, 0, 8, 8}));
  CHECK(!update_color_model(model, img, full_mask(8, 8, 1), {0, 0, 8, 8}));
  CHECK(model.hist_f == before.hist_f);
}

TEST_CASE("histograms stay normalized across random update sequences") {
  std::mt19937 rng(31);
  ImageRgb img(24, 16);
  ColorModel model(16);
  model.learn_rate_f = 0.1f;
  model.learn_rate_b = 0.2f;
  for (int step = 0; step < 1000; ++step) {
    for (auto& px : img.data())
      px = {uint8_t(rng() & 0xff), uint8_t(rng() & 0xff), uint8_t(rng() & 0xff)};
    update_color_model(model, img, half_mask(24, 16), {0, 0, 24, 16});
    if (step % 100 == 0) {
      CHECK(hist_sum(model.hist_f) == doctest::Approx(1.0).epsilon(1e-6));
      CHECK(hist_sum(model.hist_b) == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
  CHECK(hist_sum(model.hist_f) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(hist_sum(model.hist_b) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("probability map follows the histogram ratio") {
  ImageRgb img(8, 8, Rgb8{100, 100, 100});
  ColorModel model(32);
  const size_t cell = model.cell({100, 100, 100});

  SUBCASE("equal likelihoods give one half") {
    model.hist_f[cell] = 0.2f;
    model.hist_b[cell] = 0.2f;
    const ProbMap pm = probability_map(img, {0, 0, 8, 8}, model);
    CHECK(pm.values.at(4, 4) == doctest::Approx(0.5));
  }
  SUBCASE("direct substitution") {
    model.hist_f[cell] = 0.3f;
    model.hist_b[cell] = 0.1f;
    const ProbMap pm = probability_map(img, {0, 0, 8, 8}, model);
    CHECK(pm.values.at(4, 4) == doctest::Approx(0.25));
  }
  SUBCASE("unseen colors hit the epsilon floor, not a division by zero") {
    const ProbMap pm = probability_map(img, {0, 0, 8, 8}, model);
    CHECK(pm.values.at(4, 4) == doctest::Approx(0.5));
  }
}

TEST_CASE("swapping histograms mirrors the probability map") {
  std::mt19937 rng(77);
  ImageRgb img(16, 12);
  for (auto& px : img.data())
    px = {uint8_t(rng() & 0xff), uint8_t(rng() & 0xff), uint8_t(rng() & 0xff)};
  ColorModel model(16);
  for (auto& v : model.hist_f) v = float(rng() % 100);
  for (auto& v : model.hist_b) v = float(rng() % 100);

  ColorModel swapped = model;
  std::swap(swapped.hist_f, swapped.hist_b);
  const ProbMap a = probability_map(img, {0, 0, 16, 12}, model);
  const ProbMap b = probability_map(img, {0, 0, 16, 12}, swapped);
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 16; ++x)
      CHECK(a.values.at(x, y) == doctest::Approx(1.f - b.values.at(x, y)));
}

namespace {

// ProbMap from a two-color image with fully separated histograms:
// P_b = 0 left of `step_x`, 1 right of it.
ProbMap step_prob_map(int w, int h, int step_x) {
  ImageRgb img(w, h, Rgb8{200, 40, 40});
  for (int y = 0; y < h; ++y)
    for (int x = step_x; x < w; ++x) img.at(x, y) = {40, 40, 200};
  ColorModel model(32);
  model.hist_f[model.cell({200, 40, 40})] = 1.f;
  model.hist_b[model.cell({40, 40, 200})] = 1.f;
  return probability_map(img, {0, 0, w, h}, model);
}

}  // namespace

TEST_CASE("sobel response to a unit step is one half with 1/8 normalization") {
  // Hand-evaluated stencil: the positive kernel column weighs 4, so a 0->1
  // step yields 4/8 on the two columns adjacent to the transition.
  const ProbMap pm = step_prob_map(16, 8, 8);
  CHECK(pm.values.at(7, 4) == doctest::Approx(0).epsilon(1e-5));
  CHECK(pm.values.at(8, 4) == doctest::Approx(1).epsilon(1e-5));
  CHECK(pm.grad_x.at(7, 4) == doctest::Approx(0.5));
  CHECK(pm.grad_x.at(8, 4) == doctest::Approx(0.5));
  CHECK(pm.grad_x.at(5, 4) == doctest::Approx(0.0));
  CHECK(pm.grad_y.at(7, 4) == doctest::Approx(0.0));
  CHECK(pm.grad_y.at(8, 4) == doctest::Approx(0.0));
}

TEST_CASE("direction gradient on a constant map is zero") {
  ImageRgb img(12, 12, Rgb8{90, 90, 90});
  ColorModel model(32);
  model.hist_f[model.cell({90, 90, 90})] = 1.f;
  const ProbMap pm = probability_map(img, {0, 0, 12, 12}, model);
  for (double ang = 0; ang < 6.28; ang += 0.7)
    CHECK(direction_gradient(pm, Vec2(6, 6), Vec2(std::cos(ang), std::sin(ang))) ==
          doctest::Approx(0));
}

TEST_CASE("direction gradient flips sign with the direction") {
  const ProbMap pm = step_prob_map(16, 10, 8);
  const double fwd = direction_gradient(pm, Vec2(7.5, 5), Vec2(1, 0));
  const double bwd = direction_gradient(pm, Vec2(7.5, 5), Vec2(-1, 0));
  CHECK(fwd > 0);
  CHECK(bwd == doctest::Approx(-fwd));
}

TEST_CASE("direction gradient projects with the direction cosine") {
  const ProbMap pm = step_prob_map(20, 20, 10);
  const Vec2 p(9.5, 10);
  const double axis = direction_gradient(pm, p, Vec2(1, 0));
  const double diag =
      direction_gradient(pm, p, Vec2(std::cos(M_PI / 4), std::sin(M_PI / 4)));
  CHECK(diag == doctest::Approx(std::cos(M_PI / 4) * axis).epsilon(1e-6));
}

TEST_CASE("direction gradient is linear in the direction") {
  const ProbMap pm = step_prob_map(20, 20, 10);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 50; ++i) {
    const Vec2 p(4 + 12 * std::abs(u(rng)), 4 + 12 * std::abs(u(rng)));
    const Vec2 d1(u(rng), u(rng)), d2(u(rng), u(rng));
    const double a = u(rng), b = u(rng);
    const double lhs = direction_gradient(pm, p, a * d1 + b * d2);
    const double rhs = a * direction_gradient(pm, p, d1) +
                       b * direction_gradient(pm, p, d2);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("sampling outside the roi throws") {
  const ProbMap pm = step_prob_map(16, 10, 8);
  CHECK_THROWS_AS(direction_gradient(pm, Vec2(-1, 5), Vec2(1, 0)), OutOfRoi);
  CHECK_THROWS_AS(direction_gradient(pm, Vec2(5, 15.5), Vec2(1, 0)), OutOfRoi);
}
