#ifndef PFT_TRACKER_HPP
#define PFT_TRACKER_HPP

#include <memory>

#include "pft/color_segmentation.hpp"
#include "pft/geometry.hpp"
#include "pft/image.hpp"
#include "pft/joint_optimizer.hpp"
#include "pft/mesh.hpp"
#include "pft/viewpoint_model.hpp"

namespace pft {

struct TrackerConfig {
  OptimizerSchedule schedule;
  FanSearchParams fan;       // a_reg/l_src are overridden per stage
  FlowParams flow;
  int n_cnt = 200;           // contour samples per template
  int n_in = 200;            // interior samples per template
  int roi_margin = 40;       // pixels added around the projected bounding box
  double variance_cutoff = 600;  // sigma_i^2 discard threshold, px^2
  int histogram_bins = 32;
  float learn_rate_f = 0.1f;
  float learn_rate_b = 0.2f;
  bool use_interior = true;  // false: contour-only tracking (lambda = 1)
  int min_valid_contours = 10;
};

struct TrackerState {
  Pose pose;
  ColorModel color_model;
  Rect roi;             // image coordinates
  ImageU8 prev_gray;    // grayscale crop of the previous frame at `roi`
  long frame_index = 0;
  CameraIntrinsics intrinsics;
  std::shared_ptr<const TriangleMesh> mesh;
};

// Bootstraps the color model from the silhouette rendered at initial_pose and
// stores the initial ROI and grayscale crop.  Throws ObjectOutOfView.
TrackerState init_tracker(std::shared_ptr<const TriangleMesh> mesh,
                          const ViewpointModel& model,
                          const CameraIntrinsics& k, const ImageRgb& image,
                          const Pose& initial_pose, const TrackerConfig& config);

enum class TrackStatus { kOk, kLostTrack };

struct TrackResult {
  TrackStatus status = TrackStatus::kOk;
  Pose pose;
};

// Runs one frame: joint optimization, then ROI / color-model / grayscale
// updates from the converged pose.  On LostTrack the state is left unchanged
// except frame_index so the harness can apply its reset policy.
// Deterministic for identical inputs.
TrackResult track(TrackerState& state, const ImageRgb& image,
                  const ViewpointModel& model, const TrackerConfig& config);

// Restores the pose (used by the ground-truth reset policy) and rebuilds the
// dependent per-frame state from the given image.
void reset_pose(TrackerState& state, const ImageRgb& image, const Pose& pose,
                const TrackerConfig& config);

// Bounding box of the projected mesh vertices expanded by margin, clamped to
// the image; empty when nothing projects in front of the camera.
Rect projected_roi(const TriangleMesh& mesh, const CameraIntrinsics& k,
                   const Pose& t_cm, int margin, int width, int height);

}  // namespace pft

#endif  // PFT_TRACKER_HPP
