#include "pft/tracker.hpp"

#include <algorithm>
#include <cmath>

#include "pft/errors.hpp"
#include "pft/rasterizer.hpp"

namespace pft {

Rect projected_roi(const TriangleMesh& mesh, const CameraIntrinsics& k,
                   const Pose& t_cm, int margin, int width, int height) {
  double min_x = 1e30, min_y = 1e30, max_x = -1e30, max_y = -1e30;
  bool any = false;
  for (const auto& v : mesh.vertices) {
    const auto p = project(k, t_cm, v);
    if (!p) continue;
    any = true;
    min_x = std::min(min_x, p->x());
    max_x = std::max(max_x, p->x());
    min_y = std::min(min_y, p->y());
    max_y = std::max(max_y, p->y());
  }
  if (!any) return {};
  Rect r;
  r.x = int(std::floor(min_x)) - margin;
  r.y = int(std::floor(min_y)) - margin;
  r.w = int(std::ceil(max_x)) - r.x + margin;
  r.h = int(std::ceil(max_y)) - r.y + margin;
  return r.intersect({0, 0, width, height});
}

namespace {

// Full-image silhouette mask rendered only inside the ROI window.
Mask silhouette_mask(const TriangleMesh& mesh, const CameraIntrinsics& k,
                     const Pose& t_cm, const Rect& roi, int width, int height) {
  Mask full;
  full.fg = Image<uint8_t>(width, height, 0);
  if (roi.empty()) return full;
  CameraIntrinsics local = k;
  local.cx -= roi.x;
  local.cy -= roi.y;
  const DepthMap d = rasterize_depth(mesh, local, t_cm, roi.w, roi.h);
  for (int y = 0; y < roi.h; ++y)
    for (int x = 0; x < roi.w; ++x)
      if (d.valid(x, y)) full.fg.at(roi.x + x, roi.y + y) = 1;
  return full;
}

void bootstrap_color_model(TrackerState& state, const ImageRgb& image,
                           const TrackerConfig& config) {
  const Mask sil = silhouette_mask(*state.mesh, state.intrinsics, state.pose,
                                   state.roi, image.width(), image.height());
  bool any_fg = false;
  for (uint8_t v : sil.fg.data())
    if (v) {
      any_fg = true;
      break;
    }
  if (!any_fg) throw ObjectOutOfView();

  ColorModel fresh(config.histogram_bins);
  fresh.learn_rate_f = 1.f;  // first-frame bootstrap takes the instantaneous
  fresh.learn_rate_b = 1.f;  // histograms wholesale
  if (!update_color_model(fresh, image, sil, state.roi))
    throw EmptyRegion("cannot bootstrap color model: a region is empty");
  fresh.learn_rate_f = config.learn_rate_f;
  fresh.learn_rate_b = config.learn_rate_b;
  state.color_model = std::move(fresh);
}

}  // namespace

TrackerState init_tracker(std::shared_ptr<const TriangleMesh> mesh,
                          const ViewpointModel& model,
                          const CameraIntrinsics& k, const ImageRgb& image,
                          const Pose& initial_pose,
                          const TrackerConfig& config) {
  (void)model;
  TrackerState state;
  state.mesh = std::move(mesh);
  state.intrinsics = k;
  state.pose = initial_pose;
  state.roi = projected_roi(*state.mesh, k, initial_pose, config.roi_margin,
                            image.width(), image.height());
  if (state.roi.empty()) throw ObjectOutOfView();
  bootstrap_color_model(state, image, config);
  state.prev_gray = to_grayscale(crop(image, state.roi));
  state.frame_index = 0;
  return state;
}

TrackResult track(TrackerState& state, const ImageRgb& image,
                  const ViewpointModel& model, const TrackerConfig& config) {
  Pose new_pose;
  try {
    new_pose = optimize_frame(state, image, model, config);
  } catch (const LostTrack&) {
    ++state.frame_index;
    return {TrackStatus::kLostTrack, state.pose};
  }

  const Rect new_roi =
      projected_roi(*state.mesh, state.intrinsics, new_pose, config.roi_margin,
                    image.width(), image.height());
  if (new_roi.empty()) {
    ++state.frame_index;
    return {TrackStatus::kLostTrack, state.pose};
  }

  const Mask sil = silhouette_mask(*state.mesh, state.intrinsics, new_pose,
                                   new_roi, image.width(), image.height());
  update_color_model(state.color_model, image, sil, new_roi);

  state.pose = new_pose;
  state.roi = new_roi;
  state.prev_gray = to_grayscale(crop(image, new_roi));
  ++state.frame_index;
  return {TrackStatus::kOk, new_pose};
}

void reset_pose(TrackerState& state, const ImageRgb& image, const Pose& pose,
                const TrackerConfig& config) {
  state.pose = pose;
  state.roi = projected_roi(*state.mesh, state.intrinsics, pose,
                            config.roi_margin, image.width(), image.height());
  if (state.roi.empty()) throw ObjectOutOfView();
  bootstrap_color_model(state, image, config);
  state.prev_gray = to_grayscale(crop(image, state.roi));
}

}  // namespace pft
