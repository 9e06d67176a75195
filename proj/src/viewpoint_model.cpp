#include "pft/viewpoint_model.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

#include "pft/errors.hpp"
#include "pft/image.hpp"
#include "pft/rasterizer.hpp"

namespace pft {

Pose ViewpointTemplate::pose() const {
  Pose p;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) p.R(r, c) = view_pose[r * 3 + c];
  p.t = Vec3(view_pose[9], view_pose[10], view_pose[11]);
  if (p.orthonormality_drift() > 1e-9) p.R = orthonormalize(p.R);
  return p;
}

std::vector<Vec3> generate_viewpoints(int subdivision_level) {
  const TriangleMesh sphere = make_icosphere(1.0, subdivision_level);
  return sphere.vertices;
}

size_t closest_view(const ViewpointModel& model, const Pose& t_cm) {
  const Vec3 cam_dir = (-(t_cm.R.transpose() * t_cm.t)).normalized();
  size_t best = 0;
  double best_dot = -2;
  for (size_t i = 0; i < model.views.size(); ++i) {
    const double d = model.views[i].view_dir.cast<double>().dot(cam_dir);
    if (d > best_dot) {
      best_dot = d;
      best = i;
    }
  }
  return best;
}

namespace {

Pose look_at_pose(const Vec3& view_dir, double radius) {
  const Vec3 center = radius * view_dir;       // camera center, model frame
  const Vec3 forward = -view_dir;              // camera z axis, model frame
  Vec3 up(0, 0, 1);
  if (std::abs(forward.dot(up)) > 0.99) up = Vec3(1, 0, 0);
  const Vec3 xaxis = up.cross(forward).normalized();
  const Vec3 yaxis = forward.cross(xaxis);
  Mat3 r_mc;
  r_mc.col(0) = xaxis;
  r_mc.col(1) = yaxis;
  r_mc.col(2) = forward;
  Pose t_cm;
  t_cm.R = r_mc.transpose();
  t_cm.t = -(t_cm.R * center);
  return t_cm;
}

constexpr int kDirs8[8][2] = {{1, 0}, {1, 1},  {0, 1},  {-1, 1},
                              {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};

struct BoundarySample {
  int x, y;
  Vec2 normal;  // outward, unit
};

bool is_fg(const Mask& m, int x, int y) {
  return x >= 0 && y >= 0 && x < m.width() && y < m.height() && m.at(x, y);
}

bool is_boundary(const Mask& m, int x, int y) {
  if (!is_fg(m, x, y)) return false;
  return !is_fg(m, x - 1, y) || !is_fg(m, x + 1, y) || !is_fg(m, x, y - 1) ||
         !is_fg(m, x, y + 1);
}

// Moore-neighbor tracing of one boundary loop starting at (sx, sy) with the
// backtrack pixel (bx, by) known to be background.
std::vector<std::pair<int, int>> trace_loop(const Mask& m, int sx, int sy,
                                            int bx, int by) {
  std::vector<std::pair<int, int>> chain;
  int cx = sx, cy = sy;
  int pbx = bx, pby = by;
  const size_t max_steps = size_t(m.width()) * m.height() * 4 + 16;
  for (size_t step = 0; step < max_steps; ++step) {
    chain.emplace_back(cx, cy);
    int ib = -1;
    for (int i = 0; i < 8; ++i)
      if (cx + kDirs8[i][0] == pbx && cy + kDirs8[i][1] == pby) {
        ib = i;
        break;
      }
    if (ib < 0) break;  // backtrack not adjacent; should not happen
    int found = -1;
    for (int s = 1; s <= 8; ++s) {
      const int i = (ib + s) % 8;
      if (is_fg(m, cx + kDirs8[i][0], cy + kDirs8[i][1])) {
        found = i;
        break;
      }
      pbx = cx + kDirs8[i][0];
      pby = cy + kDirs8[i][1];
    }
    if (found < 0) break;  // isolated pixel
    cx += kDirs8[found][0];
    cy += kDirs8[found][1];
    if (cx == sx && cy == sy && pbx == bx && pby == by) break;  // loop closed
  }
  return chain;
}

std::vector<BoundarySample> boundary_samples(const Mask& m) {
  Image<uint8_t> traced(m.width(), m.height(), 0);
  std::vector<BoundarySample> out;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!is_boundary(m, x, y) || traced.at(x, y)) continue;
      if (is_fg(m, x - 1, y)) continue;  // enter loops from their west side
      const auto chain = trace_loop(m, x, y, x - 1, y);
      for (const auto& [px, py] : chain) traced.at(px, py) = 1;
      if (chain.size() < 3) continue;
      const size_t n = chain.size();
      for (size_t j = 0; j < n; ++j) {
        const auto& prev = chain[(j + n - 1) % n];
        const auto& next = chain[(j + 1) % n];
        const Vec2 tangent(double(next.first - prev.first),
                           double(next.second - prev.second));
        if (tangent.norm() < 1e-12) continue;
        Vec2 normal(-tangent.y(), tangent.x());
        normal.normalize();
        const auto& p = chain[j];
        // Orient outward: probe along the normal for background.
        const int qx = int(std::lround(p.first + 1.5 * normal.x()));
        const int qy = int(std::lround(p.second + 1.5 * normal.y()));
        if (is_fg(m, qx, qy)) normal = -normal;
        out.push_back({p.first, p.second, normal});
      }
    }
  }
  // One sample per pixel: keep the first occurrence.
  std::vector<BoundarySample> unique;
  Image<uint8_t> seen(m.width(), m.height(), 0);
  for (const auto& s : out) {
    if (seen.at(s.x, s.y)) continue;
    seen.at(s.x, s.y) = 1;
    unique.push_back(s);
  }
  return unique;
}

std::vector<std::pair<int, int>> interior_pixels(const Mask& m) {
  std::vector<std::pair<int, int>> out;
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) {
      if (!m.at(x, y)) continue;
      bool deep = true;
      for (int dy = -2; dy <= 2 && deep; ++dy)
        for (int dx = -2; dx <= 2; ++dx)
          if (!is_fg(m, x + dx, y + dy)) {
            deep = false;
            break;
          }
      if (deep) out.emplace_back(x, y);
    }
  return out;
}

// First k elements of a seeded Fisher-Yates shuffle.
template <typename T>
std::vector<T> sample_k(std::vector<T> pool, size_t k, std::mt19937& rng) {
  for (size_t i = 0; i < k; ++i) {
    const size_t j = i + uniform_index(rng, uint32_t(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace

ViewpointTemplate build_template(const TriangleMesh& mesh,
                                 const CameraIntrinsics& k,
                                 const Vec3& view_dir, double radius, int n_cnt,
                                 int n_in, uint32_t rng_seed, int width,
                                 int height) {
  const Pose t_cm = look_at_pose(view_dir.normalized(), radius);
  const DepthMap depth = rasterize_depth(mesh, k, t_cm, width, height);
  const Mask mask = mask_from_depth(depth);

  auto boundary = boundary_samples(mask);
  auto interior = interior_pixels(mask);
  if (int(boundary.size()) < n_cnt)
    throw InsufficientCoverage("boundary pixels (" +
                               std::to_string(boundary.size()) +
                               ") fewer than requested contour points");
  if (int(interior.size()) < n_in)
    throw InsufficientCoverage("interior pixels (" +
                               std::to_string(interior.size()) +
                               ") fewer than requested interior points");

  std::mt19937 rng(rng_seed);
  boundary = sample_k(std::move(boundary), size_t(n_cnt), rng);
  interior = sample_k(std::move(interior), size_t(n_in), rng);

  const Mat3 r_mc = t_cm.R.transpose();
  ViewpointTemplate tpl;
  tpl.view_dir = view_dir.normalized().cast<float>();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) tpl.view_pose[r * 3 + c] = float(t_cm.R(r, c));
  for (int i = 0; i < 3; ++i) tpl.view_pose[9 + i] = float(t_cm.t(i));

  tpl.contour_points.reserve(boundary.size());
  for (const auto& s : boundary) {
    const double d = depth.depth.at(s.x, s.y);
    // The silhouette edge runs between the boundary pixel center and its
    // background neighbor; anchor the stored point on the edge itself.
    const Vec2 px(s.x + 0.5 + 0.5 * s.normal.x(),
                  s.y + 0.5 + 0.5 * s.normal.y());
    const Vec3 x_c = backproject(k, px, d);
    const Vec3 x_m = r_mc * (x_c - t_cm.t);
    const Vec3 n_m = r_mc * Vec3(s.normal.x(), s.normal.y(), 0.0);
    tpl.contour_points.push_back(
        {x_m.cast<float>(), n_m.normalized().cast<float>()});
  }
  tpl.interior_points.reserve(interior.size());
  for (const auto& [px, py] : interior) {
    const double d = depth.depth.at(px, py);
    const Vec3 x_c = backproject(k, Vec2(px + 0.5, py + 0.5), d);
    tpl.interior_points.push_back((r_mc * (x_c - t_cm.t)).cast<float>());
  }
  return tpl;
}

ViewpointModel build_model(const TriangleMesh& mesh,
                           const ModelBuildParams& params) {
  ViewpointModel model;
  double radius = params.radius;
  if (radius <= 0) radius = 2.5 * (2.0 * mesh.bounding_radius());
  model.sphere_radius = float(radius);
  model.mesh_hash = mesh.digest();
  const auto dirs = generate_viewpoints(params.subdivision_level);
  model.views.reserve(dirs.size());
  for (size_t i = 0; i < dirs.size(); ++i)
    model.views.push_back(build_template(
        mesh, params.k, dirs[i], radius, params.n_cnt, params.n_in,
        params.seed + uint32_t(i), params.render_width, params.render_height));
  return model;
}

namespace {

constexpr char kMagic[4] = {'P', 'F', 'V', 'M'};
constexpr uint32_t kVersion = 1;

template <typename T>
void put(std::string& buf, const T& v) {
  static_assert(std::is_trivially_copyable_v<T>);
  buf.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T take(const std::string& buf, size_t& off) {
  if (off + sizeof(T) > buf.size()) throw ParseError("template file truncated");
  T v;
  std::memcpy(&v, buf.data() + off, sizeof(T));
  off += sizeof(T);
  return v;
}

}  // namespace

void save_model(const ViewpointModel& model, const std::string& path) {
  std::string buf;
  buf.append(kMagic, 4);
  put(buf, kVersion);
  buf.append(reinterpret_cast<const char*>(model.mesh_hash.data()), 32);
  put(buf, uint32_t(model.views.size()));
  put(buf, model.sphere_radius);
  for (const auto& v : model.views) {
    for (int i = 0; i < 3; ++i) put(buf, v.view_dir[i]);
    for (float f : v.view_pose) put(buf, f);
    put(buf, uint32_t(v.contour_points.size()));
    for (const auto& cp : v.contour_points) {
      for (int i = 0; i < 3; ++i) put(buf, cp.x[i]);
      for (int i = 0; i < 3; ++i) put(buf, cp.n[i]);
    }
    put(buf, uint32_t(v.interior_points.size()));
    for (const auto& ip : v.interior_points)
      for (int i = 0; i < 3; ++i) put(buf, ip[i]);
  }
  const uint32_t crc = uint32_t(
      crc32(0, reinterpret_cast<const Bytef*>(buf.data()), uInt(buf.size())));
  put(buf, crc);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(buf.data(), std::streamsize(buf.size()));
  if (!out) throw IoError("write failed: " + path);
}

ViewpointModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string buf((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  if (buf.size() < 4 + 4 + 32 + 4 + 4 + 4)
    throw ParseError("template file truncated: " + path);

  const size_t body = buf.size() - 4;
  uint32_t stored_crc;
  std::memcpy(&stored_crc, buf.data() + body, 4);
  const uint32_t crc = uint32_t(
      crc32(0, reinterpret_cast<const Bytef*>(buf.data()), uInt(body)));
  if (crc != stored_crc)
    throw ParseError("template file checksum mismatch: " + path);

  size_t off = 0;
  char magic[4];
  std::memcpy(magic, buf.data(), 4);
  off = 4;
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw ParseError("not a viewpoint model file: " + path);
  const uint32_t version = take<uint32_t>(buf, off);
  if (version != kVersion)
    throw ParseError("template file version mismatch: " + path);

  ViewpointModel model;
  std::memcpy(model.mesh_hash.data(), buf.data() + off, 32);
  off += 32;
  const uint32_t n_views = take<uint32_t>(buf, off);
  model.sphere_radius = take<float>(buf, off);
  model.views.resize(n_views);
  for (auto& v : model.views) {
    for (int i = 0; i < 3; ++i) v.view_dir[i] = take<float>(buf, off);
    for (float& f : v.view_pose) f = take<float>(buf, off);
    const uint32_t nc = take<uint32_t>(buf, off);
    v.contour_points.resize(nc);
    for (auto& cp : v.contour_points) {
      for (int i = 0; i < 3; ++i) cp.x[i] = take<float>(buf, off);
      for (int i = 0; i < 3; ++i) cp.n[i] = take<float>(buf, off);
    }
    const uint32_t ni = take<uint32_t>(buf, off);
    v.interior_points.resize(ni);
    for (auto& ip : v.interior_points)
      for (int i = 0; i < 3; ++i) ip[i] = take<float>(buf, off);
  }
  if (off != body) throw ParseError("template file has trailing bytes: " + path);
  return model;
}

}  // namespace pft
