#pragma once

#include <array>

#include "figsim/geometry/vec3.hpp"

namespace figsim {

struct ClosestPair {
  double distance = 0.0;
  Vec3 point_a;
  Vec3 point_b;
};

//! Closest points between two segments.
ClosestPair segment_segment_closest(const Vec3& p0, const Vec3& p1, const Vec3& q0,
                                    const Vec3& q1);

//! Closest point on triangle (a,b,c) to p.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

//! Exact minimum distance between two triangles with realizing points.
//! Intersecting triangles report distance 0 with a shared witness point.
ClosestPair triangle_triangle_closest(const std::array<Vec3, 3>& ta,
                                      const std::array<Vec3, 3>& tb);

}  // namespace figsim
