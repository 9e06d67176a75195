#ifndef PFT_RASTERIZER_HPP
#define PFT_RASTERIZER_HPP

#include <cstdint>
#include <limits>
#include <optional>

#include "pft/geometry.hpp"
#include "pft/image.hpp"
#include "pft/mesh.hpp"

namespace pft {

inline constexpr float kInvalidDepth = std::numeric_limits<float>::infinity();

// Per-pixel depth along the optical axis (meters); kInvalidDepth = background.
struct DepthMap {
  ImageF depth;

  int width() const { return depth.width(); }
  int height() const { return depth.height(); }
  bool valid(int x, int y) const { return depth.at(x, y) != kInvalidDepth; }
};

struct Mask {
  Image<uint8_t> fg;  // 1 = foreground

  int width() const { return fg.width(); }
  int height() const { return fg.height(); }
  bool at(int x, int y) const { return fg.at(x, y) != 0; }
};

// Z-buffered perspective rasterization with a top-left fill rule.  Both
// windings are rendered; ties at exactly equal depth go to the lower triangle
// index.  Throws DegenerateMesh when no triangle lies in front of the camera.
DepthMap rasterize_depth(const TriangleMesh& mesh, const CameraIntrinsics& k,
                         const Pose& t_cm, int width, int height);

// Same rasterization, also recording the winning triangle index per pixel
// (UINT32_MAX = background).
struct RasterOutput {
  DepthMap depth;
  Image<uint32_t> triangle;
};
RasterOutput rasterize_depth_indexed(const TriangleMesh& mesh,
                                     const CameraIntrinsics& k,
                                     const Pose& t_cm, int width, int height);

Mask mask_from_depth(const DepthMap& d);

struct RenderOptions {
  double noise_sigma = 0;   // additive Gaussian, 8-bit units, per channel
  double light_gain = 1;    // global intensity multiplier
  std::optional<Rect> occluder;
  Rgb8 occluder_color{96, 96, 104};
  uint32_t seed = 0;
};

// Flat-shaded Lambertian render composited over the background image.
// Deterministic for a fixed seed.
ImageRgb render_synthetic_frame(const TriangleMesh& mesh,
                                const CameraIntrinsics& k, const Pose& t_cm,
                                const ImageRgb& background, Rgb8 albedo,
                                const RenderOptions& options = {});

}  // namespace pft

#endif  // PFT_RASTERIZER_HPP
