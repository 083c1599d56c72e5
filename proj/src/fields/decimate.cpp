#include "figsim/fields/decimate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <vector>

namespace figsim {
namespace {

//! Symmetric 4x4 plane quadric, upper triangle storage.
struct Quadric {
  // a11 a12 a13 a14 a22 a23 a24 a33 a34 a44
  std::array<double, 10> q{};

  void add_plane(const Vec3& n, double d, double weight = 1.0) {
    const double a = n.x, b = n.y, c = n.z;
    q[0] += weight * a * a;
    q[1] += weight * a * b;
    q[2] += weight * a * c;
    q[3] += weight * a * d;
    q[4] += weight * b * b;
    q[5] += weight * b * c;
    q[6] += weight * b * d;
    q[7] += weight * c * c;
    q[8] += weight * c * d;
    q[9] += weight * d * d;
  }

  Quadric operator+(const Quadric& o) const {
    Quadric r;
    for (int i = 0; i < 10; ++i) r.q[i] = q[i] + o.q[i];
    return r;
  }

  double error(const Vec3& v) const {
    return q[0] * v.x * v.x + 2 * q[1] * v.x * v.y + 2 * q[2] * v.x * v.z + 2 * q[3] * v.x +
           q[4] * v.y * v.y + 2 * q[5] * v.y * v.z + 2 * q[6] * v.y + q[7] * v.z * v.z +
           2 * q[8] * v.z + q[9];
  }

  //! Minimizer of the quadric, if the 3x3 system is well conditioned.
  bool minimize(Vec3& out) const {
    const double a11 = q[0], a12 = q[1], a13 = q[2], a22 = q[4], a23 = q[5], a33 = q[7];
    const double det = a11 * (a22 * a33 - a23 * a23) - a12 * (a12 * a33 - a23 * a13) +
                       a13 * (a12 * a23 - a22 * a13);
    const double scale = std::max({std::fabs(a11), std::fabs(a22), std::fabs(a33), 1e-300});
    if (std::fabs(det) < 1e-10 * scale * scale * scale) return false;
    const double bx = -q[3], by = -q[6], bz = -q[8];
    out.x = (bx * (a22 * a33 - a23 * a23) - a12 * (by * a33 - a23 * bz) +
             a13 * (by * a23 - a22 * bz)) /
            det;
    out.y = (a11 * (by * a33 - a23 * bz) - bx * (a12 * a33 - a13 * a23) +
             a13 * (a12 * bz - by * a13)) /
            det;
    out.z = (a11 * (a22 * bz - by * a23) - a12 * (a12 * bz - by * a13) +
             bx * (a12 * a23 - a22 * a13)) /
            det;
    return out.is_finite();
  }
};

struct Candidate {
  double cost;
  int a, b;           // collapse b into a
  Vec3 position;
  uint64_t version;   // sum of endpoint versions at push time
  bool operator>(const Candidate& o) const { return cost > o.cost; }
};

}  // namespace

TriMesh decimate(const TriMesh& mesh, int target_faces) {
  if (static_cast<int>(mesh.faces.size()) <= target_faces) return mesh;

  const int nv = static_cast<int>(mesh.vertices.size());
  std::vector<Vec3> pos = mesh.vertices;
  std::vector<std::array<int, 3>> faces = mesh.faces;
  std::vector<bool> face_alive(faces.size(), true);
  std::vector<bool> vert_alive(nv, true);
  std::vector<uint64_t> version(nv, 0);
  std::vector<Quadric> quadric(nv);
  std::vector<std::set<int>> incident(nv);  // vertex -> alive face ids

  int alive_faces = 0;
  for (size_t f = 0; f < faces.size(); ++f) {
    const auto& t = faces[f];
    const Vec3 n = (pos[t[1]] - pos[t[0]]).cross(pos[t[2]] - pos[t[0]]);
    const double area = 0.5 * n.norm();
    if (area > 0.0) {
      const Vec3 un = n.normalized();
      const double d = -un.dot(pos[t[0]]);
      for (int k = 0; k < 3; ++k) quadric[t[k]].add_plane(un, d, area);
    }
    for (int k = 0; k < 3; ++k) incident[t[k]].insert(static_cast<int>(f));
    ++alive_faces;
  }

  // Boundary constraint quadrics: edges bordering exactly one face get a
  // high-weight plane through the edge, perpendicular to the face.
  std::map<std::array<int, 2>, std::vector<int>> edge_faces;
  for (size_t f = 0; f < faces.size(); ++f) {
    for (int k = 0; k < 3; ++k) {
      int i = faces[f][k], j = faces[f][(k + 1) % 3];
      if (i > j) std::swap(i, j);
      edge_faces[{i, j}].push_back(static_cast<int>(f));
    }
  }
  for (const auto& [edge, fs] : edge_faces) {
    if (fs.size() != 1) continue;
    const auto& t = faces[fs[0]];
    const Vec3 fn = (pos[t[1]] - pos[t[0]]).cross(pos[t[2]] - pos[t[0]]).normalized();
    const Vec3 e = pos[edge[1]] - pos[edge[0]];
    const Vec3 cn = e.cross(fn).normalized();
    if (cn.norm() == 0.0) continue;
    const double d = -cn.dot(pos[edge[0]]);
    const double w = 1e3 * e.squared_norm();
    Quadric c;
    c.add_plane(cn, d, w);
    quadric[edge[0]] = quadric[edge[0]] + c;
    quadric[edge[1]] = quadric[edge[1]] + c;
  }

  std::priority_queue<Candidate, std::vector<Candidate>, std::greater<Candidate>> heap;

  auto best_position = [&](int a, int b, const Quadric& q, double& cost) {
    Vec3 v;
    if (q.minimize(v)) {
      cost = q.error(v);
      return v;
    }
    const Vec3 mid = 0.5 * (pos[a] + pos[b]);
    v = mid;
    cost = q.error(mid);
    for (const Vec3& c : {pos[a], pos[b]}) {
      const double e = q.error(c);
      if (e < cost) {
        cost = e;
        v = c;
      }
    }
    return v;
  };

  auto push_edge = [&](int a, int b) {
    if (a > b) std::swap(a, b);
    const Quadric q = quadric[a] + quadric[b];
    double cost = 0.0;
    const Vec3 v = best_position(a, b, q, cost);
    heap.push({cost, a, b, v, version[a] + version[b]});
  };

  for (const auto& [edge, fs] : edge_faces) push_edge(edge[0], edge[1]);

  auto neighbors = [&](int v) {
    std::set<int> out;
    for (const int f : incident[v]) {
      for (const int u : faces[f]) {
        if (u != v) out.insert(u);
      }
    }
    return out;
  };

  while (alive_faces > target_faces && !heap.empty()) {
    const Candidate c = heap.top();
    heap.pop();
    const int a = c.a, b = c.b;
    if (!vert_alive[a] || !vert_alive[b]) continue;
    if (c.version != version[a] + version[b]) continue;  // stale

    // The edge must still exist.
    bool adjacent = false;
    for (const int f : incident[a]) {
      const auto& t = faces[f];
      if (t[0] == b || t[1] == b || t[2] == b) {
        adjacent = true;
        break;
      }
    }
    if (!adjacent) continue;

    // Link condition: interior edges must share exactly two neighbors,
    // otherwise the collapse pinches the surface.
    const auto na = neighbors(a);
    const auto nb = neighbors(b);
    int common = 0;
    for (const int u : na) {
      if (nb.count(u)) ++common;
    }
    if (common > 2) continue;

    // Reject collapses that flip a surviving face normal.
    bool flips = false;
    for (const int v : {a, b}) {
      for (const int f : incident[v]) {
        const auto& t = faces[f];
        const bool dies = (t[0] == a || t[1] == a || t[2] == a) &&
                          (t[0] == b || t[1] == b || t[2] == b);
        if (dies) continue;
        Vec3 p[3], pn[3];
        for (int k = 0; k < 3; ++k) {
          p[k] = pos[t[k]];
          pn[k] = (t[k] == a || t[k] == b) ? c.position : pos[t[k]];
        }
        const Vec3 n0 = (p[1] - p[0]).cross(p[2] - p[0]);
        const Vec3 n1 = (pn[1] - pn[0]).cross(pn[2] - pn[0]);
        if (n0.dot(n1) <= 0.0) {
          flips = true;
          break;
        }
      }
      if (flips) break;
    }
    if (flips) continue;

    // Apply: b merges into a at the optimal position.
    pos[a] = c.position;
    quadric[a] = quadric[a] + quadric[b];
    vert_alive[b] = false;
    ++version[a];
    ++version[b];

    std::vector<int> b_faces(incident[b].begin(), incident[b].end());
    for (const int f : b_faces) {
      auto& t = faces[f];
      const bool has_a = (t[0] == a || t[1] == a || t[2] == a);
      if (has_a) {
        // Face spanned the collapsed edge; it disappears.
        face_alive[f] = false;
        --alive_faces;
        for (const int u : t) incident[u].erase(f);
      } else {
        for (int k = 0; k < 3; ++k) {
          if (t[k] == b) t[k] = a;
        }
        incident[a].insert(f);
      }
    }
    incident[b].clear();

    for (const int u : neighbors(a)) push_edge(a, u);
  }

  TriMesh out;
  out.object_id = mesh.object_id;
  std::vector<int> remap(nv, -1);
  for (size_t f = 0; f < faces.size(); ++f) {
    if (!face_alive[f]) continue;
    std::array<int, 3> t{};
    for (int k = 0; k < 3; ++k) {
      const int v = faces[f][k];
      if (remap[v] < 0) {
        remap[v] = static_cast<int>(out.vertices.size());
        out.vertices.push_back(pos[v]);
      }
      t[k] = remap[v];
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) continue;
    out.faces.push_back(t);
  }
  return out;
}

}  // namespace figsim
