#ifndef PFT_INTERIOR_FLOW_HPP
#define PFT_INTERIOR_FLOW_HPP

#include <vector>

#include "pft/geometry.hpp"
#include "pft/image.hpp"

namespace pft {

// Dense displacement field (previous frame -> current frame) over an ROI.
struct FlowField {
  Rect roi;      // image coordinates
  ImageF u_x;    // roi-local storage
  ImageF u_y;

  // Bilinear displacement at an image-coordinate point inside the ROI.
  Vec2 sample(const Vec2& image_pt) const;
};

struct FlowParams {
  int pyramid_levels = 3;       // finest processed level is half ROI resolution
  int patch_size = 8;
  int patch_stride = 4;
  int inverse_search_iters = 12;
  bool densification = true;    // weighted blend of overlapping patches
};

struct InteriorCorrespondence {
  Vec2 x_in = Vec2::Zero();        // projected interior point, pixels
  Vec2 x_in_prime = Vec2::Zero();  // flow target, pixels
  double c_in = 1;                 // confidence in [0, 1]
  Vec3 x_model = Vec3::Zero();     // source 3D point, model frame
};

// Coarse-to-fine patch-based inverse-search flow.  Images may be full frames
// (roi within them) or ROI-sized crops.  Deterministic.
// Throws RoiTooSmall when the coarsest pyramid level cannot fit one patch.
FlowField compute_flow(const ImageU8& prev_gray, const ImageU8& cur_gray,
                       const Rect& roi, const FlowParams& params);

// max(1 - e^2, 0).
double confidence_from_error(double e);

// Patch-wise flow confidence from intensity, gradient-magnitude and flow
// smoothness errors over an s x s patch (s = 3) around x_in.  prev_gray and
// cur_gray must be ROI-sized crops matching flow.roi.
// Throws PatchOutOfBounds when the patch leaves the ROI.
double flow_confidence(const ImageU8& prev_gray, const ImageU8& cur_gray,
                       const FlowField& flow, const Vec2& x_in);

// Projects template interior points with the previous pose and reads their
// flow targets; points outside the ROI (or whose confidence patch would leave
// it) are dropped.  Confidence is 1 unless images are supplied.
std::vector<InteriorCorrespondence> interior_correspondences(
    const std::vector<Eigen::Vector3f>& template_points, const Pose& t_cm,
    const CameraIntrinsics& k, const FlowField& flow);
std::vector<InteriorCorrespondence> interior_correspondences(
    const std::vector<Eigen::Vector3f>& template_points, const Pose& t_cm,
    const CameraIntrinsics& k, const FlowField& flow,
    const ImageU8& prev_gray, const ImageU8& cur_gray);

// c * exp(-gamma * r^2).
double interior_weight(double r, double c, double gamma);

}  // namespace pft

#endif  // PFT_INTERIOR_FLOW_HPP
