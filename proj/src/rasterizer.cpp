#include "pft/rasterizer.hpp"

#include <algorithm>
#include <cmath>

#include "pft/errors.hpp"

namespace pft {

namespace {

constexpr double kNearPlane = 1e-4;

// Sutherland-Hodgman against z = kNearPlane; emits at most 4 vertices.
int clip_near(const Vec3 in[3], Vec3 out[4]) {
  int n = 0;
  for (int i = 0; i < 3; ++i) {
    const Vec3& a = in[i];
    const Vec3& b = in[(i + 1) % 3];
    const bool ain = a.z() > kNearPlane, bin = b.z() > kNearPlane;
    if (ain) out[n++] = a;
    if (ain != bin) {
      const double s = (kNearPlane - a.z()) / (b.z() - a.z());
      out[n++] = a + s * (b - a);
    }
  }
  return n;
}

template <typename PerPixel>
void raster_triangle(const Vec3& c0, const Vec3& c1, const Vec3& c2,
                     const CameraIntrinsics& k, int width, int height,
                     PerPixel&& emit) {
  const Vec2 p0(k.fx * c0.x() / c0.z() + k.cx, k.fy * c0.y() / c0.z() + k.cy);
  const Vec2 p1(k.fx * c1.x() / c1.z() + k.cx, k.fy * c1.y() / c1.z() + k.cy);
  const Vec2 p2(k.fx * c2.x() / c2.z() + k.cx, k.fy * c2.y() / c2.z() + k.cy);

  Vec2 a = p0, b = p1, c = p2;
  double za = c0.z(), zb = c1.z(), zc = c2.z();
  double area2 = (b.x() - a.x()) * (c.y() - a.y()) -
                 (b.y() - a.y()) * (c.x() - a.x());
  if (area2 == 0) return;
  if (area2 < 0) {  // normalize winding so interior has positive edge values
    std::swap(b, c);
    std::swap(zb, zc);
    area2 = -area2;
  }

  const int x0 = std::max(0, int(std::floor(std::min({a.x(), b.x(), c.x()}) - 0.5)));
  const int x1 = std::min(width - 1, int(std::ceil(std::max({a.x(), b.x(), c.x()}) - 0.5)));
  const int y0 = std::max(0, int(std::floor(std::min({a.y(), b.y(), c.y()}) - 0.5)));
  const int y1 = std::min(height - 1, int(std::ceil(std::max({a.y(), b.y(), c.y()}) - 0.5)));
  if (x0 > x1 || y0 > y1) return;

  // Edge i is opposite vertex i; zero-valued samples are kept only on
  // top or left edges.
  struct Edge {
    double ax, ay, dx, dy;
    bool accept_zero;
  };
  auto make_edge = [](const Vec2& s, const Vec2& e) {
    Edge ed{s.x(), s.y(), e.x() - s.x(), e.y() - s.y(), false};
    ed.accept_zero = (ed.dy == 0) ? (ed.dx > 0) : (ed.dy < 0);
    return ed;
  };
  const Edge e0 = make_edge(b, c), e1 = make_edge(c, a), e2 = make_edge(a, b);
  auto eval = [](const Edge& e, double px, double py) {
    return e.dx * (py - e.ay) - e.dy * (px - e.ax);
  };
  auto inside = [&](const Edge& e, double w) {
    return w > 0 || (w == 0 && e.accept_zero);
  };

  const double iza = 1.0 / za, izb = 1.0 / zb, izc = 1.0 / zc;
  for (int y = y0; y <= y1; ++y) {
    const double py = y + 0.5;
    for (int x = x0; x <= x1; ++x) {
      const double px = x + 0.5;
      const double w0 = eval(e0, px, py);
      const double w1 = eval(e1, px, py);
      const double w2 = eval(e2, px, py);
      if (!inside(e0, w0) || !inside(e1, w1) || !inside(e2, w2)) continue;
      const double inv_z = (w0 * iza + w1 * izb + w2 * izc) / area2;
      emit(x, y, float(1.0 / inv_z));
    }
  }
}

RasterOutput rasterize_impl(const TriangleMesh& mesh, const CameraIntrinsics& k,
                            const Pose& t_cm, int width, int height,
                            bool keep_index) {
  mesh.validate();
  RasterOutput out;
  out.depth.depth = ImageF(width, height, kInvalidDepth);
  if (keep_index) out.triangle = Image<uint32_t>(width, height, UINT32_MAX);

  size_t in_front = 0;
  for (size_t ti = 0; ti < mesh.triangles.size(); ++ti) {
    const auto& tri = mesh.triangles[ti];
    const Vec3 cam[3] = {t_cm.apply(mesh.vertices[tri[0]]),
                         t_cm.apply(mesh.vertices[tri[1]]),
                         t_cm.apply(mesh.vertices[tri[2]])};
    Vec3 clipped[4];
    const int n = clip_near(cam, clipped);
    if (n < 3) continue;
    ++in_front;
    auto emit = [&](int x, int y, float z) {
      float& d = out.depth.depth.at(x, y);
      if (z < d) {
        d = z;
        if (keep_index) out.triangle.at(x, y) = uint32_t(ti);
      } else if (z == d && keep_index && uint32_t(ti) < out.triangle.at(x, y)) {
        out.triangle.at(x, y) = uint32_t(ti);
      }
    };
    for (int i = 1; i + 1 < n; ++i)
      raster_triangle(clipped[0], clipped[i], clipped[i + 1], k, width, height,
                      emit);
  }
  if (in_front == 0)
    throw DegenerateMesh("no triangle projects in front of the camera");
  return out;
}

}  // namespace

DepthMap rasterize_depth(const TriangleMesh& mesh, const CameraIntrinsics& k,
                         const Pose& t_cm, int width, int height) {
  return rasterize_impl(mesh, k, t_cm, width, height, false).depth;
}

RasterOutput rasterize_depth_indexed(const TriangleMesh& mesh,
                                     const CameraIntrinsics& k,
                                     const Pose& t_cm, int width, int height) {
  return rasterize_impl(mesh, k, t_cm, width, height, true);
}

Mask mask_from_depth(const DepthMap& d) {
  Mask m;
  m.fg = Image<uint8_t>(d.width(), d.height(), 0);
  for (int y = 0; y < d.height(); ++y)
    for (int x = 0; x < d.width(); ++x)
      if (d.valid(x, y)) m.fg.at(x, y) = 1;
  return m;
}

ImageRgb render_synthetic_frame(const TriangleMesh& mesh,
                                const CameraIntrinsics& k, const Pose& t_cm,
                                const ImageRgb& background, Rgb8 albedo,
                                const RenderOptions& options) {
  ImageRgb out = background;
  const int w = out.width(), h = out.height();

  RasterOutput ro;
  bool visible = true;
  try {
    ro = rasterize_depth_indexed(mesh, k, t_cm, w, h);
  } catch (const DegenerateMesh&) {
    visible = false;  // object entirely behind the camera: background only
  }

  if (visible) {
    // One shade per face: Lambertian with a fixed camera-frame light.
    const Vec3 light = Vec3(0.35, -0.45, -0.82).normalized();
    std::vector<float> shade(mesh.triangles.size());
    for (size_t ti = 0; ti < mesh.triangles.size(); ++ti) {
      const auto& tri = mesh.triangles[ti];
      const Vec3 a = t_cm.apply(mesh.vertices[tri[0]]);
      const Vec3 b = t_cm.apply(mesh.vertices[tri[1]]);
      const Vec3 c = t_cm.apply(mesh.vertices[tri[2]]);
      Vec3 n = (b - a).cross(c - a);
      const double nn = n.norm();
      if (nn == 0) {
        shade[ti] = 0.35f;
        continue;
      }
      n /= nn;
      if (n.z() > 0) n = -n;  // face the camera
      shade[ti] = float(0.35 + 0.65 * std::max(0.0, n.dot(light)));
    }
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const uint32_t ti = ro.triangle.at(x, y);
        if (ti == UINT32_MAX) continue;
        const float s = shade[ti];
        out.at(x, y) = {uint8_t(std::lround(albedo.r * s)),
                        uint8_t(std::lround(albedo.g * s)),
                        uint8_t(std::lround(albedo.b * s))};
      }
  }

  if (options.occluder) {
    const Rect r = options.occluder->intersect({0, 0, w, h});
    for (int y = r.y; y < r.y + r.h; ++y)
      for (int x = r.x; x < r.x + r.w; ++x) out.at(x, y) = options.occluder_color;
  }

  if (options.light_gain != 1.0) {
    for (auto& px : out.data()) {
      auto scale = [&](uint8_t v) {
        return uint8_t(std::clamp(std::lround(v * options.light_gain), 0L, 255L));
      };
      px = {scale(px.r), scale(px.g), scale(px.b)};
    }
  }

  if (options.noise_sigma > 0) {
    std::mt19937 rng(options.seed);
    for (auto& px : out.data()) {
      auto jitter = [&](uint8_t v) {
        const double n = gaussian_sample(rng) * options.noise_sigma;
        return uint8_t(std::clamp(std::lround(v + n), 0L, 255L));
      };
      px = {jitter(px.r), jitter(px.g), jitter(px.b)};
    }
  }
  return out;
}

}  // namespace pft
