#ifndef PFT_SEQUENCE_HPP
#define PFT_SEQUENCE_HPP

#include <string>
#include <vector>

#include "pft/geometry.hpp"
#include "pft/image.hpp"
#include "pft/mesh.hpp"

namespace pft {

// Directory layout read by load_sequence:
//   <dir>/frames/*.png   ordered frames (falls back to <dir>/*.png)
//   <dir>/poses.txt      optional, one line per frame: 9 rotation entries
//                        (row-major) + 3 translation entries
//   <dir>/camera.txt     fx fy cx cy [width height]
//   <dir>/meta.txt       optional key=value: units=m|mm, mesh=<path>
struct FormatConfig {
  std::string pose_file = "poses.txt";
  std::string camera_file = "camera.txt";
  std::string meta_file = "meta.txt";
  std::string frames_dir = "frames";
  bool translation_in_mm = false;  // meta units= overrides this
};

struct Sequence {
  std::vector<std::string> frame_paths;
  std::vector<Pose> gt_poses;  // empty when no ground truth is present
  CameraIntrinsics intrinsics;
  int width = 0, height = 0;
  std::string mesh_path;  // from meta.txt, may be empty

  size_t size() const { return frame_paths.size(); }
  bool has_ground_truth() const { return !gt_poses.empty(); }
  ImageRgb frame(size_t i) const;
};

Sequence load_sequence(const std::string& path, const FormatConfig& fmt = {});

// Ground-truth pose text I/O (meters unless mm is requested).
std::vector<Pose> load_pose_file(const std::string& path, bool in_mm);
void save_pose_file(const std::string& path, const std::vector<Pose>& poses);

struct TrajectorySpec {
  int frames = 200;
  Pose base;
  enum class Motion { kStatic, kOrbit } motion = Motion::kOrbit;
  double rot_step_deg = 3.0;   // exact per-frame rotation delta
  double trans_amp_m = 0.05;   // lateral oscillation amplitude
  double axis_period = 80;     // frames per rotation-axis sweep
};

// Poses with a per-frame rotation delta of exactly rot_step_deg about a
// slowly precessing model-frame axis (sweeping between in-plane tumble and
// spin about the model z axis) plus a smooth translation oscillation.
std::vector<Pose> make_trajectory(const TrajectorySpec& spec);

enum class SynthVariant { kRegular, kNoise, kLight, kOcclusion };

struct SynthParams {
  SynthVariant variant = SynthVariant::kRegular;
  double noise_sigma = 15;
  int width = 640, height = 512;
  uint32_t seed = 1;
  Rgb8 albedo{214, 124, 56};
};

// Renders each ground-truth pose over a deterministic textured background and
// writes the sequence directory (frames, poses, camera, meta).
// Throws ObjectOutOfView when a pose leaves the frame.
Sequence generate_synthetic_sequence(const TriangleMesh& mesh,
                                     const CameraIntrinsics& k,
                                     const std::vector<Pose>& gt_poses,
                                     const SynthParams& params,
                                     const std::string& out_dir,
                                     const std::string& mesh_ref = "");

// Deterministic low-frequency color texture used as the synthetic background.
ImageRgb make_background(int width, int height, uint32_t seed);

// Tracked-trajectory CSV: frame_index, 9 rotation entries row-major,
// 3 translation entries (meters), runtime_ms.
struct TrajectoryEntry {
  long frame_index = 0;
  Pose pose;
  double runtime_ms = 0;
};

void save_trajectory(const std::string& path,
                     const std::vector<TrajectoryEntry>& entries);
std::vector<TrajectoryEntry> load_trajectory(const std::string& path);

}  // namespace pft

#endif  // PFT_SEQUENCE_HPP
