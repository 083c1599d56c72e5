#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "figsim/geometry/aabb.hpp"
#include "figsim/geometry/transform.hpp"
#include "figsim/geometry/vec3.hpp"

namespace figsim {

//! Triangle mesh with indexed faces.
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  int object_id = 0;

  bool indices_valid() const;
  Aabb bounds() const;
  Vec3 centroid() const;  // arithmetic mean of vertices

  Vec3 face_normal(int f) const;  // unit normal, zero vector for degenerate faces
  double face_area(int f) const;

  //! Undirected unique vertex-index edges (i < j), sorted.
  std::vector<std::array<int, 2>> undirected_edges() const;
};

struct MeshReport {
  bool watertight = false;
  int degenerate_faces = 0;
  int duplicate_vertices = 0;
};

//! Watertight iff every undirected edge borders exactly two faces.
MeshReport validate_mesh(const TriMesh& mesh);

TriMesh apply_transform(const TriMesh& mesh, const RigidTransform& t);

// Procedural primitives used by tests, the toy simulator, and demos.
TriMesh make_tetrahedron(double scale = 1.0);
TriMesh make_box(const Vec3& half_extents);
TriMesh make_icosphere(double radius, int subdivisions);

}  // namespace figsim
