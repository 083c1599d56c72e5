#include "figsim/geometry/trimesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace figsim {

bool TriMesh::indices_valid() const {
  const int n = static_cast<int>(vertices.size());
  for (const auto& f : faces) {
    for (int k = 0; k < 3; ++k) {
      if (f[k] < 0 || f[k] >= n) return false;
    }
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) return false;
  }
  return true;
}

Aabb TriMesh::bounds() const {
  Aabb b;
  for (const auto& v : vertices) b.extend(v);
  return b;
}

Vec3 TriMesh::centroid() const {
  Vec3 c;
  for (const auto& v : vertices) c += v;
  return vertices.empty() ? c : c / static_cast<double>(vertices.size());
}

Vec3 TriMesh::face_normal(int f) const {
  const auto& t = faces[f];
  const Vec3 n = (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]);
  const double len = n.norm();
  return len > 0.0 ? n / len : Vec3{0, 0, 0};
}

double TriMesh::face_area(int f) const {
  const auto& t = faces[f];
  return 0.5 * (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]).norm();
}

std::vector<std::array<int, 2>> TriMesh::undirected_edges() const {
  std::set<std::array<int, 2>> edges;
  for (const auto& f : faces) {
    for (int k = 0; k < 3; ++k) {
      int i = f[k], j = f[(k + 1) % 3];
      if (i > j) std::swap(i, j);
      edges.insert({i, j});
    }
  }
  return {edges.begin(), edges.end()};
}

MeshReport validate_mesh(const TriMesh& mesh) {
  MeshReport report;

  std::map<std::array<int, 2>, int> edge_count;
  for (size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& t = mesh.faces[f];
    const Vec3 n =
        (mesh.vertices[t[1]] - mesh.vertices[t[0]]).cross(mesh.vertices[t[2]] - mesh.vertices[t[0]]);
    if (n.norm() == 0.0) ++report.degenerate_faces;
    for (int k = 0; k < 3; ++k) {
      int i = t[k], j = t[(k + 1) % 3];
      if (i > j) std::swap(i, j);
      ++edge_count[{i, j}];
    }
  }

  report.watertight = !mesh.faces.empty();
  for (const auto& [edge, count] : edge_count) {
    if (count != 2) {
      report.watertight = false;
      break;
    }
  }

  std::set<std::array<double, 3>> seen;
  for (const auto& v : mesh.vertices) {
    if (!seen.insert({v.x, v.y, v.z}).second) ++report.duplicate_vertices;
  }
  return report;
}

TriMesh apply_transform(const TriMesh& mesh, const RigidTransform& t) {
  TriMesh out = mesh;
  for (auto& v : out.vertices) v = t.apply(v);
  return out;
}

TriMesh make_tetrahedron(double scale) {
  TriMesh m;
  m.vertices = {{scale, scale, scale},
                {scale, -scale, -scale},
                {-scale, scale, -scale},
                {-scale, -scale, scale}};
  m.faces = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
  return m;
}

TriMesh make_box(const Vec3& h) {
  TriMesh m;
  m.vertices = {{-h.x, -h.y, -h.z}, {h.x, -h.y, -h.z}, {h.x, h.y, -h.z}, {-h.x, h.y, -h.z},
                {-h.x, -h.y, h.z},  {h.x, -h.y, h.z},  {h.x, h.y, h.z},  {-h.x, h.y, h.z}};
  m.faces = {{0, 2, 1}, {0, 3, 2},   // bottom
             {4, 5, 6}, {4, 6, 7},   // top
             {0, 1, 5}, {0, 5, 4},   // -y
             {2, 3, 7}, {2, 7, 6},   // +y
             {1, 2, 6}, {1, 6, 5},   // +x
             {3, 0, 4}, {3, 4, 7}};  // -x
  return m;
}

TriMesh make_icosphere(double radius, int subdivisions) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  TriMesh m;
  m.vertices = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
                {0, -1, -t}, {0, 1, -t}, {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9},
             {5, 11, 4}, {11, 10, 2}, {10, 7, 6},  {7, 1, 8},  {3, 9, 4},   {3, 4, 2},
             {3, 2, 6},  {3, 6, 8},  {3, 8, 9},   {4, 9, 5},  {2, 4, 11},  {6, 2, 10},
             {8, 6, 7},  {9, 8, 1}};

  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::array<int, 2>, int> midpoint;
    auto mid = [&](int a, int b) {
      std::array<int, 2> key{std::min(a, b), std::max(a, b)};
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const int idx = static_cast<int>(m.vertices.size());
      m.vertices.push_back(0.5 * (m.vertices[a] + m.vertices[b]));
      midpoint[key] = idx;
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(m.faces.size() * 4);
    for (const auto& f : m.faces) {
      const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    m.faces = std::move(next);
  }

  for (auto& v : m.vertices) v = v.normalized() * radius;
  return m;
}

}  // namespace figsim
