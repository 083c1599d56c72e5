#include "figsim/fields/marching_cubes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "figsim/error.hpp"
#include "mc_tables.hpp"

namespace figsim {
namespace {

// Unique key for a grid edge: origin lattice point + axis.
uint64_t edge_key(int i, int j, int k, int axis) {
  return (uint64_t(axis) << 60) | (uint64_t(i) << 40) | (uint64_t(j) << 20) | uint64_t(k);
}

}  // namespace

TriMesh marching_cubes(const DensityField& field, const Aabb& volume, int grid_points,
                       double threshold) {
  if (grid_points < 2) throw InvalidSpec("marching_cubes: need at least 2 grid points per axis");
  if (!volume.valid()) throw InvalidSpec("marching_cubes: invalid volume");

  const int n = grid_points;
  const Vec3 ext = volume.extent();
  const Vec3 h{ext.x / (n - 1), ext.y / (n - 1), ext.z / (n - 1)};

  auto point = [&](int i, int j, int k) {
    return volume.min + Vec3{h.x * i, h.y * j, h.z * k};
  };

  std::vector<double> values(size_t(n) * n * n);
  auto value = [&](int i, int j, int k) -> double {
    return values[(size_t(k) * n + j) * n + i];
  };
  // Boundary lattice planes are clamped just below the threshold so regions
  // that cross the volume get capped at it instead of left open.
  const double cap = threshold - (std::abs(threshold) + 1.0) * 1e-12;
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        double v = field.density(point(i, j, k));
        if (i == 0 || i == n - 1 || j == 0 || j == n - 1 || k == 0 || k == n - 1) {
          v = std::min(v, cap);
        }
        values[(size_t(k) * n + j) * n + i] = v;
      }
    }
  }

  // Lattice offsets per cube corner, classic numbering.
  static constexpr int kCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                        {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};

  TriMesh mesh;
  std::unordered_map<uint64_t, int> edge_vertex;

  auto vertex_on_edge = [&](int ci, int cj, int ck, int edge) -> int {
    const int* a = kCorner[mc::kEdgeCorners[edge][0]];
    const int* b = kCorner[mc::kEdgeCorners[edge][1]];
    int ai = ci + a[0], aj = cj + a[1], ak = ck + a[2];
    int bi = ci + b[0], bj = cj + b[1], bk = ck + b[2];
    // Canonical orientation: edge key from the lexicographically smaller end.
    if (std::tie(bi, bj, bk) < std::tie(ai, aj, ak)) {
      std::swap(ai, bi);
      std::swap(aj, bj);
      std::swap(ak, bk);
    }
    const int axis = (bi != ai) ? 0 : (bj != aj ? 1 : 2);
    const uint64_t key = edge_key(ai, aj, ak, axis);
    const auto it = edge_vertex.find(key);
    if (it != edge_vertex.end()) return it->second;

    const double va = value(ai, aj, ak);
    const double vb = value(bi, bj, bk);
    double t = 0.5;
    if (vb != va) t = (threshold - va) / (vb - va);
    if (t < 0.0) t = 0.0;
    if (t > 1.0) t = 1.0;
    const Vec3 pa = point(ai, aj, ak);
    const Vec3 pb = point(bi, bj, bk);
    const int idx = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back(pa + t * (pb - pa));
    edge_vertex[key] = idx;
    return idx;
  };

  for (int k = 0; k + 1 < n; ++k) {
    for (int j = 0; j + 1 < n; ++j) {
      for (int i = 0; i + 1 < n; ++i) {
        int cube = 0;
        for (int c = 0; c < 8; ++c) {
          if (value(i + kCorner[c][0], j + kCorner[c][1], k + kCorner[c][2]) < threshold) {
            cube |= 1 << c;
          }
        }
        if (mc::kEdgeTable[cube] == 0) continue;
        const int* tri = mc::kTriTable[cube];
        for (int t = 0; tri[t] != -1; t += 3) {
          const int v0 = vertex_on_edge(i, j, k, tri[t]);
          const int v1 = vertex_on_edge(i, j, k, tri[t + 1]);
          const int v2 = vertex_on_edge(i, j, k, tri[t + 2]);
          if (v0 == v1 || v1 == v2 || v0 == v2) continue;  // collapsed sliver
          mesh.faces.push_back({v0, v1, v2});
        }
      }
    }
  }

  if (mesh.faces.empty()) throw EmptySurface("marching_cubes: no grid edge crosses threshold");
  return mesh;
}

}  // namespace figsim
