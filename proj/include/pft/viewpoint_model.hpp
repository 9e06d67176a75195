#ifndef PFT_VIEWPOINT_MODEL_HPP
#define PFT_VIEWPOINT_MODEL_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pft/geometry.hpp"
#include "pft/mesh.hpp"

namespace pft {

struct ContourPoint {
  Eigen::Vector3f x;  // model frame, meters
  Eigen::Vector3f n;  // model frame, unit

  bool operator==(const ContourPoint& o) const {
    return x == o.x && n == o.n;
  }
};

// Per-view sample set: 3D contour points with lifted normals plus 3D interior
// points, all in the model frame.  Numeric fields are stored as f32 so a
// save/load round trip is bit-exact.
struct ViewpointTemplate {
  Eigen::Vector3f view_dir;            // unit, model frame
  std::array<float, 12> view_pose;     // R row-major then t, T_CM at generation
  std::vector<ContourPoint> contour_points;
  std::vector<Eigen::Vector3f> interior_points;

  Pose pose() const;  // re-orthonormalized double-precision view pose

  bool operator==(const ViewpointTemplate& o) const {
    return view_dir == o.view_dir && view_pose == o.view_pose &&
           contour_points == o.contour_points &&
           interior_points == o.interior_points;
  }
};

struct ViewpointModel {
  std::vector<ViewpointTemplate> views;
  float sphere_radius = 0;             // camera distance at generation, meters
  std::array<uint8_t, 32> mesh_hash{};

  bool operator==(const ViewpointModel& o) const {
    return views == o.views && sphere_radius == o.sphere_radius &&
           mesh_hash == o.mesh_hash;
  }
};

// Icosphere vertices at the given subdivision level: 12 at level 0,
// 10*4^n + 2 at level n.
std::vector<Vec3> generate_viewpoints(int subdivision_level);

// Renders the mesh from `radius` meters along view_dir, samples n_cnt mask
// boundary pixels (with outward 2D normals) and n_in interior pixels at least
// 2 px from the boundary, and lifts both into the model frame.
// Throws InsufficientCoverage when the mask is too small.
ViewpointTemplate build_template(const TriangleMesh& mesh,
                                 const CameraIntrinsics& k,
                                 const Vec3& view_dir, double radius, int n_cnt,
                                 int n_in, uint32_t rng_seed, int width = 640,
                                 int height = 512);

struct ModelBuildParams {
  int subdivision_level = 3;
  double radius = 0;  // 0: 2.5 x bounding-sphere diameter
  int n_cnt = 200;
  int n_in = 200;
  uint32_t seed = 1;
  CameraIntrinsics k{600, 600, 319.5, 255.5};
  int render_width = 640;
  int render_height = 512;
};

ViewpointModel build_model(const TriangleMesh& mesh,
                           const ModelBuildParams& params);

// Index of the view whose direction best aligns with the camera direction
// (unit vector from the model origin to the camera center, model frame).
size_t closest_view(const ViewpointModel& model, const Pose& t_cm);

// Binary format: magic "PFVM", u32 version, 32-byte mesh digest, u32 view
// count, f32 sphere_radius, per-view payload, trailing CRC32; little-endian.
void save_model(const ViewpointModel& model, const std::string& path);
ViewpointModel load_model(const std::string& path);

}  // namespace pft

#endif  // PFT_VIEWPOINT_MODEL_HPP
