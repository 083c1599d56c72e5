#include "figsim/geometry/proximity.hpp"

#include <algorithm>
#include <numeric>

#include "figsim/geometry/tridist.hpp"

namespace figsim {
namespace {

std::array<Vec3, 3> face_points(const TriMesh& m, int f) {
  const auto& t = m.faces[f];
  return {m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]};
}

bool face_degenerate(const TriMesh& m, int f) {
  const auto p = face_points(m, f);
  return (p[1] - p[0]).cross(p[2] - p[0]).norm() == 0.0;
}

}  // namespace

FaceBvh::FaceBvh(const TriMesh& mesh) : mesh_(&mesh) {
  const int n = static_cast<int>(mesh.faces.size());
  face_boxes_.resize(n);
  degenerate_.resize(n);
  for (int f = 0; f < n; ++f) {
    Aabb b;
    for (const auto& p : face_points(mesh, f)) b.extend(p);
    face_boxes_[f] = b;
    degenerate_[f] = face_degenerate(mesh, f);
  }
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0);
  if (n > 0) root_ = build(0, n);
}

int FaceBvh::build(int begin, int end) {
  Node node;
  for (int i = begin; i < end; ++i) node.box.extend(face_boxes_[order_[i]]);
  const int idx = static_cast<int>(nodes_.size());
  nodes_.push_back(node);

  if (end - begin <= 4) {
    nodes_[idx].begin = begin;
    nodes_[idx].end = end;
    return idx;
  }

  const Vec3 ext = node.box.extent();
  int axis = 0;
  if (ext.y > ext.x) axis = 1;
  if (ext.z > ext[axis]) axis = 2;

  const int mid = (begin + end) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int a, int b) {
                     const double ca = face_boxes_[a].center()[axis];
                     const double cb = face_boxes_[b].center()[axis];
                     return ca < cb || (ca == cb && a < b);
                   });

  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[idx].left = left;
  nodes_[idx].right = right;
  return idx;
}

void FaceBvh::collect(int self_node, const FaceBvh& other, int other_node, double radius,
                      std::vector<FacePair>& out) const {
  const Node& a = nodes_[self_node];
  const Node& b = other.nodes_[other_node];
  if (a.box.distance(b.box) > radius) return;

  const bool a_leaf = a.left < 0;
  const bool b_leaf = b.left < 0;
  if (a_leaf && b_leaf) {
    for (int i = a.begin; i < a.end; ++i) {
      const int fa = order_[i];
      if (degenerate_[fa]) continue;
      for (int j = b.begin; j < b.end; ++j) {
        const int fb = other.order_[j];
        if (other.degenerate_[fb]) continue;
        if (face_boxes_[fa].distance(other.face_boxes_[fb]) > radius) continue;
        const ClosestPair cp =
            triangle_triangle_closest(face_points(*mesh_, fa), face_points(*other.mesh_, fb));
        if (cp.distance <= radius) {
          out.push_back({fa, fb, cp.point_a, cp.point_b, cp.distance});
        }
      }
    }
    return;
  }
  if (a_leaf || (!b_leaf && b.box.extent().squared_norm() > a.box.extent().squared_norm())) {
    collect(self_node, other, b.left, radius, out);
    collect(self_node, other, b.right, radius, out);
  } else {
    collect(a.left, other, other_node, radius, out);
    collect(a.right, other, other_node, radius, out);
  }
}

std::vector<FacePair> FaceBvh::pairs_within(const FaceBvh& other, double radius) const {
  std::vector<FacePair> out;
  if (root_ >= 0 && other.root_ >= 0) collect(root_, other, other.root_, radius, out);
  std::sort(out.begin(), out.end(), [](const FacePair& p, const FacePair& q) {
    return p.face_a < q.face_a || (p.face_a == q.face_a && p.face_b < q.face_b);
  });
  return out;
}

std::vector<FacePair> closest_face_pairs(const TriMesh& a, const TriMesh& b, double radius) {
  const FaceBvh ba(a);
  const FaceBvh bb(b);
  return ba.pairs_within(bb, radius);
}

std::vector<FacePair> closest_face_pairs_brute(const TriMesh& a, const TriMesh& b,
                                               double radius) {
  std::vector<FacePair> out;
  for (int fa = 0; fa < static_cast<int>(a.faces.size()); ++fa) {
    if (face_degenerate(a, fa)) continue;
    for (int fb = 0; fb < static_cast<int>(b.faces.size()); ++fb) {
      if (face_degenerate(b, fb)) continue;
      const ClosestPair cp = triangle_triangle_closest(face_points(a, fa), face_points(b, fb));
      if (cp.distance <= radius) out.push_back({fa, fb, cp.point_a, cp.point_b, cp.distance});
    }
  }
  return out;
}

}  // namespace figsim
