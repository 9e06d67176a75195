#include "pft/mesh.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "pft/errors.hpp"

namespace pft {

double TriangleMesh::bounding_radius() const {
  double r2 = 0;
  for (const auto& v : vertices) r2 = std::max(r2, v.squaredNorm());
  return std::sqrt(r2);
}

double TriangleMesh::diameter() const {
  double d2 = 0;
  for (size_t i = 0; i < vertices.size(); ++i)
    for (size_t j = i + 1; j < vertices.size(); ++j)
      d2 = std::max(d2, (vertices[i] - vertices[j]).squaredNorm());
  return std::sqrt(d2);
}

std::array<uint8_t, 32> TriangleMesh::digest() const {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  for (const auto& v : vertices) {
    const double c[3] = {v.x(), v.y(), v.z()};
    EVP_DigestUpdate(ctx, c, sizeof(c));
  }
  for (const auto& t : triangles) EVP_DigestUpdate(ctx, t.data(), sizeof(t));
  std::array<uint8_t, 32> out{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, out.data(), &len);
  EVP_MD_CTX_free(ctx);
  return out;
}

void TriangleMesh::validate() const {
  if (triangles.empty()) throw DegenerateMesh("mesh has no triangles");
  for (const auto& t : triangles)
    for (uint32_t idx : t)
      if (idx >= vertices.size())
        throw DegenerateMesh("triangle index out of range");
  for (const auto& v : vertices)
    if (!v.allFinite()) throw DegenerateMesh("mesh has non-finite vertices");
}

TriangleMesh load_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  TriangleMesh mesh;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "v") {
      double x, y, z;
      if (!(ss >> x >> y >> z))
        throw ParseError(path + ":" + std::to_string(lineno) + ": bad vertex");
      mesh.vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<uint32_t> idx;
      std::string tok;
      while (ss >> tok) {
        // "i", "i/t", "i/t/n", "i//n"; indices are 1-based.
        const long v = std::strtol(tok.c_str(), nullptr, 10);
        if (v == 0)
          throw ParseError(path + ":" + std::to_string(lineno) + ": bad face");
        idx.push_back(v > 0 ? uint32_t(v - 1)
                            : uint32_t(long(mesh.vertices.size()) + v));
      }
      if (idx.size() < 3)
        throw ParseError(path + ":" + std::to_string(lineno) +
                         ": face with fewer than 3 vertices");
      for (size_t i = 1; i + 1 < idx.size(); ++i)
        mesh.triangles.push_back({idx[0], idx[i], idx[i + 1]});
    }
  }
  mesh.validate();
  return mesh;
}

void save_obj(const std::string& path, const TriangleMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.precision(12);
  for (const auto& v : mesh.vertices)
    out << "v " << v.x() << " " << v.y() << " " << v.z() << "\n";
  for (const auto& t : mesh.triangles)
    out << "f " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
  if (!out) throw IoError("write failed: " + path);
}

TriangleMesh make_box(double sx, double sy, double sz) {
  TriangleMesh m;
  const double x = sx / 2, y = sy / 2, z = sz / 2;
  m.vertices = {{-x, -y, -z}, {x, -y, -z}, {x, y, -z}, {-x, y, -z},
                {-x, -y, z},  {x, -y, z},  {x, y, z},  {-x, y, z}};
  m.triangles = {{0, 2, 1}, {0, 3, 2}, {4, 5, 6}, {4, 6, 7},
                 {0, 1, 5}, {0, 5, 4}, {2, 3, 7}, {2, 7, 6},
                 {1, 2, 6}, {1, 6, 5}, {3, 0, 4}, {3, 4, 7}};
  return m;
}

TriangleMesh make_cylinder(double radius, double height, int segments) {
  TriangleMesh m;
  const double hz = height / 2;
  for (int i = 0; i < segments; ++i) {
    const double a = 2.0 * M_PI * i / segments;
    m.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a), -hz);
    m.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a), hz);
  }
  const uint32_t bottom_c = uint32_t(m.vertices.size());
  m.vertices.emplace_back(0, 0, -hz);
  const uint32_t top_c = uint32_t(m.vertices.size());
  m.vertices.emplace_back(0, 0, hz);
  for (int i = 0; i < segments; ++i) {
    const uint32_t b0 = uint32_t(2 * i), t0 = b0 + 1;
    const uint32_t b1 = uint32_t(2 * ((i + 1) % segments)), t1 = b1 + 1;
    m.triangles.push_back({b0, b1, t1});
    m.triangles.push_back({b0, t1, t0});
    m.triangles.push_back({bottom_c, b1, b0});
    m.triangles.push_back({top_c, t0, t1});
  }
  return m;
}

namespace {

void icosahedron(std::vector<Vec3>& v, std::vector<std::array<uint32_t, 3>>& f) {
  const double p = (1.0 + std::sqrt(5.0)) / 2.0;
  v = {{-1, p, 0}, {1, p, 0}, {-1, -p, 0}, {1, -p, 0},
       {0, -1, p}, {0, 1, p}, {0, -1, -p}, {0, 1, -p},
       {p, 0, -1}, {p, 0, 1}, {-p, 0, -1}, {-p, 0, 1}};
  for (auto& x : v) x.normalize();
  f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
       {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
       {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
       {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
}

}  // namespace

TriangleMesh make_icosphere(double radius, int level) {
  std::vector<Vec3> verts;
  std::vector<std::array<uint32_t, 3>> faces;
  icosahedron(verts, faces);
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<uint32_t, uint32_t>, uint32_t> midpoints;
    auto mid = [&](uint32_t a, uint32_t b) {
      const auto key = std::minmax(a, b);
      auto it = midpoints.find(key);
      if (it != midpoints.end()) return it->second;
      verts.push_back((verts[a] + verts[b]).normalized());
      const uint32_t idx = uint32_t(verts.size() - 1);
      midpoints.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<uint32_t, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& t : faces) {
      const uint32_t ab = mid(t[0], t[1]), bc = mid(t[1], t[2]),
                     ca = mid(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({ab, t[1], bc});
      next.push_back({ca, bc, t[2]});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }
  TriangleMesh m;
  m.vertices.reserve(verts.size());
  for (const auto& v : verts) m.vertices.push_back(v * radius);
  m.triangles = std::move(faces);
  return m;
}

TriangleMesh make_widget(double scale) {
  // Main slab with an off-center wedge on top and a stub on one side;
  // silhouettes differ across all viewing directions.
  TriangleMesh m = make_box(1.0, 0.6, 0.4);
  auto add = [&m](const TriangleMesh& part, const Vec3& offset) {
    const uint32_t base = uint32_t(m.vertices.size());
    for (const auto& v : part.vertices) m.vertices.push_back(v + offset);
    for (const auto& t : part.triangles)
      m.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
  };
  // Wedge: half of a box, sliced along a diagonal.
  TriangleMesh wedge;
  wedge.vertices = {{-0.25, -0.2, 0}, {0.25, -0.2, 0}, {0.25, 0.2, 0},
                    {-0.25, 0.2, 0},  {-0.25, -0.2, 0.35}, {-0.25, 0.2, 0.35}};
  wedge.triangles = {{0, 1, 2}, {0, 2, 3}, {4, 5, 3}, {4, 3, 0},
                     {1, 4, 0}, {1, 2, 5}, {1, 5, 4}, {2, 3, 5}};
  add(wedge, {0.15, 0.0, 0.2});
  add(make_box(0.3, 0.25, 0.25), {0.55, -0.1, -0.05});
  for (auto& v : m.vertices) v *= scale;
  return m;
}

}  // namespace pft
