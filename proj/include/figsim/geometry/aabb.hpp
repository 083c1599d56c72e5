#pragma once

#include <limits>

#include "figsim/geometry/vec3.hpp"

namespace figsim {

struct Aabb {
  Vec3 min{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
           std::numeric_limits<double>::max()};
  Vec3 max{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest(),
           std::numeric_limits<double>::lowest()};

  constexpr Aabb() = default;
  constexpr Aabb(const Vec3& mn, const Vec3& mx) : min(mn), max(mx) {}

  bool valid() const { return min.x <= max.x && min.y <= max.y && min.z <= max.z; }

  void extend(const Vec3& p) {
    min = min.cwise_min(p);
    max = max.cwise_max(p);
  }
  void extend(const Aabb& b) {
    min = min.cwise_min(b.min);
    max = max.cwise_max(b.max);
  }

  bool contains(const Vec3& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z &&
           p.z <= max.z;
  }

  Vec3 center() const { return 0.5 * (min + max); }
  Vec3 extent() const { return max - min; }
  double diagonal() const { return (max - min).norm(); }

  Aabb expanded(const Vec3& margin) const { return {min - margin, max + margin}; }

  //! Euclidean distance between two boxes (0 if overlapping).
  double distance(const Aabb& o) const {
    Vec3 d{0, 0, 0};
    for (int i = 0; i < 3; ++i) {
      const double lo = (min[i] > o.max[i]) ? min[i] - o.max[i] : 0.0;
      const double hi = (o.min[i] > max[i]) ? o.min[i] - max[i] : 0.0;
      d[i] = lo + hi;
    }
    return d.norm();
  }
};

}  // namespace figsim
