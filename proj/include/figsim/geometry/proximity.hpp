#pragma once

#include <vector>

#include "figsim/geometry/aabb.hpp"
#include "figsim/geometry/trimesh.hpp"

namespace figsim {

struct FacePair {
  int face_a = -1;
  int face_b = -1;
  Vec3 closest_a;
  Vec3 closest_b;
  double distance = 0.0;
};

//! Binary AABB tree over mesh faces; median split on the longest axis, leaf size 4.
class FaceBvh {
 public:
  explicit FaceBvh(const TriMesh& mesh);

  const TriMesh& mesh() const { return *mesh_; }

  //! All face pairs of (this, other) closer than radius. Degenerate faces excluded.
  std::vector<FacePair> pairs_within(const FaceBvh& other, double radius) const;

 private:
  struct Node {
    Aabb box;
    int left = -1;   // child index, -1 for leaf
    int right = -1;
    int begin = 0;   // leaf face range into order_
    int end = 0;
  };

  int build(int begin, int end);
  void collect(int self_node, const FaceBvh& other, int other_node, double radius,
               std::vector<FacePair>& out) const;

  const TriMesh* mesh_;
  std::vector<Node> nodes_;
  std::vector<int> order_;
  std::vector<Aabb> face_boxes_;
  std::vector<bool> degenerate_;
  int root_ = -1;
};

//! Face pairs with triangle-triangle distance <= radius, identical to brute force.
//! Output sorted by (face_a, face_b).
std::vector<FacePair> closest_face_pairs(const TriMesh& a, const TriMesh& b, double radius);

//! Brute-force oracle; same contract, no acceleration structure.
std::vector<FacePair> closest_face_pairs_brute(const TriMesh& a, const TriMesh& b,
                                               double radius);

}  // namespace figsim
