#include "pft/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "pft/errors.hpp"
#include "pft/rasterizer.hpp"
#include "pft/tracker.hpp"

namespace fs = std::filesystem;

namespace pft {

ImageRgb Sequence::frame(size_t i) const { return read_png(frame_paths.at(i)); }

namespace {

std::map<std::string, std::string> read_kv_file(const std::string& path) {
  std::map<std::string, std::string> kv;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

}  // namespace

std::vector<Pose> load_pose_file(const std::string& path, bool in_mm) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<Pose> poses;
  std::string line;
  int lineno = 0;
  const double scale = in_mm ? 1e-3 : 1.0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::vector<double> vals;
    double v;
    while (ss >> v) vals.push_back(v);
    if (vals.empty()) continue;
    if (vals.size() != 12) throw MalformedPoseLine(path, lineno);
    Pose p;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) p.R(r, c) = vals[size_t(r) * 3 + c];
    p.t = Vec3(vals[9], vals[10], vals[11]) * scale;
    poses.push_back(p);
  }
  return poses;
}

void save_pose_file(const std::string& path, const std::vector<Pose>& poses) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.precision(17);
  for (const auto& p : poses) {
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) out << p.R(r, c) << " ";
    out << p.t.x() << " " << p.t.y() << " " << p.t.z() << "\n";
  }
}

Sequence load_sequence(const std::string& path, const FormatConfig& fmt) {
  if (!fs::exists(path)) throw IoError("sequence directory missing: " + path);
  Sequence seq;

  fs::path frames = fs::path(path) / fmt.frames_dir;
  if (!fs::is_directory(frames)) frames = path;
  for (const auto& entry : fs::directory_iterator(frames))
    if (entry.path().extension() == ".png")
      seq.frame_paths.push_back(entry.path().string());
  std::sort(seq.frame_paths.begin(), seq.frame_paths.end());
  if (seq.frame_paths.empty())
    throw MissingFrames("no frames found under " + path);

  bool in_mm = fmt.translation_in_mm;
  const fs::path meta = fs::path(path) / fmt.meta_file;
  if (fs::exists(meta)) {
    const auto kv = read_kv_file(meta.string());
    if (auto it = kv.find("units"); it != kv.end()) in_mm = it->second == "mm";
    if (auto it = kv.find("mesh"); it != kv.end()) {
      fs::path m = it->second;
      seq.mesh_path = m.is_absolute() ? m.string() : (fs::path(path) / m).string();
    }
  }

  const fs::path cam = fs::path(path) / fmt.camera_file;
  if (fs::exists(cam)) {
    std::ifstream in(cam);
    if (!(in >> seq.intrinsics.fx >> seq.intrinsics.fy >> seq.intrinsics.cx >>
          seq.intrinsics.cy))
      throw ParseError("malformed camera file: " + cam.string());
    if (!(in >> seq.width >> seq.height)) {
      seq.width = 0;
      seq.height = 0;
    }
  }
  if (seq.width == 0) {
    const ImageRgb first = read_png(seq.frame_paths.front());
    seq.width = first.width();
    seq.height = first.height();
  }

  const fs::path posef = fs::path(path) / fmt.pose_file;
  if (fs::exists(posef)) {
    seq.gt_poses = load_pose_file(posef.string(), in_mm);
    if (seq.gt_poses.size() != seq.frame_paths.size())
      throw MissingFrames("frame count (" +
                          std::to_string(seq.frame_paths.size()) +
                          ") does not match pose count (" +
                          std::to_string(seq.gt_poses.size()) + ")");
  }
  return seq;
}

std::vector<Pose> make_trajectory(const TrajectorySpec& spec) {
  std::vector<Pose> poses;
  poses.reserve(size_t(spec.frames));
  Mat3 r = spec.base.R;
  const double step = spec.rot_step_deg * M_PI / 180.0;
  for (int i = 0; i < spec.frames; ++i) {
    Pose p;
    if (i > 0 && spec.motion == TrajectorySpec::Motion::kOrbit) {
      // Axis sweeps between spin about model z and in-plane tumble.
      const double tilt =
          M_PI / 2.0 * (0.5 + 0.5 * std::sin(2.0 * M_PI * i / spec.axis_period));
      const double swing = 2.0 * M_PI * i / (1.7 * spec.axis_period);
      const Vec3 axis(std::cos(swing) * std::sin(tilt),
                      std::sin(swing) * std::sin(tilt), std::cos(tilt));
      r = r * Eigen::AngleAxisd(step, axis.normalized()).toRotationMatrix();
    }
    p.R = r;
    p.t = spec.base.t;
    if (spec.motion == TrajectorySpec::Motion::kOrbit) {
      const double a = spec.trans_amp_m;
      p.t += Vec3(a * std::sin(2.0 * M_PI * i / 97.0),
                  0.6 * a * std::sin(2.0 * M_PI * i / 71.0 + 0.8),
                  0.3 * a * std::sin(2.0 * M_PI * i / 131.0));
    }
    poses.push_back(p);
  }
  return poses;
}

ImageRgb make_background(int width, int height, uint32_t seed) {
  std::mt19937 rng(seed);
  constexpr int kGrid = 16;
  const int gw = width / kGrid + 2, gh = height / kGrid + 2;
  std::vector<Rgb8> grid(size_t(gw) * gh);
  for (auto& c : grid) {
    // Cool palette, well separated from the warm object albedos.
    c.r = uint8_t(30 + uniform_index(rng, 60));
    c.g = uint8_t(70 + uniform_index(rng, 80));
    c.b = uint8_t(110 + uniform_index(rng, 110));
  }
  ImageRgb img(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double gx = double(x) / kGrid, gy = double(y) / kGrid;
      const int x0 = int(gx), y0 = int(gy);
      const double fx = gx - x0, fy = gy - y0;
      auto lerp = [&](auto get) {
        const double v00 = get(grid[size_t(y0) * gw + x0]);
        const double v10 = get(grid[size_t(y0) * gw + x0 + 1]);
        const double v01 = get(grid[size_t(y0 + 1) * gw + x0]);
        const double v11 = get(grid[size_t(y0 + 1) * gw + x0 + 1]);
        return (1 - fx) * (1 - fy) * v00 + fx * (1 - fy) * v10 +
               (1 - fx) * fy * v01 + fx * fy * v11;
      };
      img.at(x, y) = {uint8_t(lerp([](Rgb8 c) { return c.r; })),
                      uint8_t(lerp([](Rgb8 c) { return c.g; })),
                      uint8_t(lerp([](Rgb8 c) { return c.b; }))};
    }
  return img;
}

Sequence generate_synthetic_sequence(const TriangleMesh& mesh,
                                     const CameraIntrinsics& k,
                                     const std::vector<Pose>& gt_poses,
                                     const SynthParams& params,
                                     const std::string& out_dir,
                                     const std::string& mesh_ref) {
  fs::create_directories(fs::path(out_dir) / "frames");
  const ImageRgb background =
      make_background(params.width, params.height, params.seed);

  const int n = int(gt_poses.size());
  for (int i = 0; i < n; ++i) {
    const Pose& pose = gt_poses[size_t(i)];
    const Rect roi =
        projected_roi(mesh, k, pose, 0, params.width, params.height);
    if (roi.empty()) throw ObjectOutOfView();

    RenderOptions opt;
    opt.seed = params.seed + uint32_t(i) * 7919u;
    switch (params.variant) {
      case SynthVariant::kRegular:
        break;
      case SynthVariant::kNoise:
        opt.noise_sigma = params.noise_sigma;
        break;
      case SynthVariant::kLight: {
        // Gain ramp 0.7 -> 1.3 and back over the sequence.
        const double phase = n > 1 ? double(i) / (n - 1) : 0.0;
        opt.light_gain = 0.7 + 0.6 * (phase < 0.5 ? 2 * phase : 2 - 2 * phase);
        break;
      }
      case SynthVariant::kOcclusion: {
        const int ow = std::max(20, roi.w / 4), oh = std::max(20, roi.h / 4);
        const double ang = 2.0 * M_PI * i / 120.0;
        opt.occluder = Rect{roi.x + roi.w / 2 + int(roi.w * 0.3 * std::cos(ang)) - ow / 2,
                            roi.y + roi.h / 2 + int(roi.h * 0.3 * std::sin(ang)) - oh / 2,
                            ow, oh};
        break;
      }
    }
    const ImageRgb frame =
        render_synthetic_frame(mesh, k, pose, background, params.albedo, opt);
    char name[32];
    std::snprintf(name, sizeof(name), "%06d.png", i);
    write_png((fs::path(out_dir) / "frames" / name).string(), frame);
  }

  save_pose_file((fs::path(out_dir) / "poses.txt").string(), gt_poses);
  {
    std::ofstream cam((fs::path(out_dir) / "camera.txt").string());
    cam.precision(12);
    cam << k.fx << " " << k.fy << " " << k.cx << " " << k.cy << " "
        << params.width << " " << params.height << "\n";
  }
  {
    std::ofstream meta((fs::path(out_dir) / "meta.txt").string());
    meta << "units = m\n";
    if (!mesh_ref.empty()) meta << "mesh = " << mesh_ref << "\n";
  }
  return load_sequence(out_dir);
}

void save_trajectory(const std::string& path,
                     const std::vector<TrajectoryEntry>& entries) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "# frame, r00..r22 row-major, tx, ty, tz (m), runtime_ms\n";
  out.precision(17);
  for (const auto& e : entries) {
    out << e.frame_index;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) out << "," << e.pose.R(r, c);
    out << "," << e.pose.t.x() << "," << e.pose.t.y() << "," << e.pose.t.z();
    out << "," << e.runtime_ms << "\n";
  }
}

std::vector<TrajectoryEntry> load_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<TrajectoryEntry> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    TrajectoryEntry e;
    std::vector<double> vals;
    double v;
    if (!(ss >> e.frame_index)) throw ParseError(path + ": bad frame index");
    while (ss >> v) vals.push_back(v);
    if (vals.size() != 13)
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": expected 13 values after the frame index");
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) e.pose.R(r, c) = vals[size_t(r) * 3 + c];
    e.pose.t = Vec3(vals[9], vals[10], vals[11]);
    e.runtime_ms = vals[12];
    entries.push_back(e);
  }
  return entries;
}

}  // namespace pft
