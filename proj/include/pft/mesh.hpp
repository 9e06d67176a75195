#ifndef PFT_MESH_HPP
#define PFT_MESH_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pft/geometry.hpp"

namespace pft {

struct TriangleMesh {
  std::vector<Vec3> vertices;                    // meters, model frame
  std::vector<std::array<uint32_t, 3>> triangles;

  // Radius of the vertex bounding sphere around the model origin.
  double bounding_radius() const;
  // Largest distance between any two vertices (d_m in the ADD metric).
  double diameter() const;
  // SHA-256 over the canonical vertex/index byte stream.
  std::array<uint8_t, 32> digest() const;

  void validate() const;  // throws DegenerateMesh on bad indices / NaNs
};

// Wavefront OBJ subset: v and f records, faces triangulated fan-wise.
TriangleMesh load_obj(const std::string& path);
void save_obj(const std::string& path, const TriangleMesh& mesh);

// Procedural meshes for synthetic scenes and tests.
TriangleMesh make_box(double sx, double sy, double sz);
TriangleMesh make_cylinder(double radius, double height, int segments);
TriangleMesh make_icosphere(double radius, int level);
// Box with a wedge and a side stub: no rotational symmetry from any axis.
TriangleMesh make_widget(double scale);

}  // namespace pft

#endif  // PFT_MESH_HPP
