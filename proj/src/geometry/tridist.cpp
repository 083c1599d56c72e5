#include "figsim/geometry/tridist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace figsim {
namespace {

// Moller-Trumbore, segment form. Returns the hit point for a proper crossing.
std::optional<Vec3> segment_triangle_hit(const Vec3& p0, const Vec3& p1, const Vec3& a,
                                         const Vec3& b, const Vec3& c) {
  const Vec3 dir = p1 - p0;
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 pv = dir.cross(e2);
  const double det = e1.dot(pv);
  if (std::fabs(det) < 1e-14) return std::nullopt;  // parallel or coplanar
  const double inv = 1.0 / det;
  const Vec3 tv = p0 - a;
  const double u = tv.dot(pv) * inv;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3 qv = tv.cross(e1);
  const double v = dir.dot(qv) * inv;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  const double t = e2.dot(qv) * inv;
  if (t < 0.0 || t > 1.0) return std::nullopt;
  return p0 + t * dir;
}

}  // namespace

ClosestPair segment_segment_closest(const Vec3& p0, const Vec3& p1, const Vec3& q0,
                                    const Vec3& q1) {
  // Ericson, Real-Time Collision Detection, 5.1.9.
  const Vec3 d1 = p1 - p0;
  const Vec3 d2 = q1 - q0;
  const Vec3 r = p0 - q0;
  const double a = d1.dot(d1);
  const double e = d2.dot(d2);
  const double f = d2.dot(r);
  double s = 0.0, t = 0.0;

  if (a <= 1e-30 && e <= 1e-30) {
    // both degenerate
  } else if (a <= 1e-30) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= 1e-30) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      if (denom > 1e-30) s = std::clamp((b * f - c * e) / denom, 0.0, 1.0);
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }

  ClosestPair out;
  out.point_a = p0 + s * d1;
  out.point_b = q0 + t * d2;
  out.distance = (out.point_a - out.point_b).norm();
  return out;
}

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  // Ericson, Real-Time Collision Detection, 5.1.5.
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return a + v * ab;
  }

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return a + w * ac;
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return b + w * (c - b);
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom;
  const double w = vc * denom;
  return a + v * ab + w * ac;
}

ClosestPair triangle_triangle_closest(const std::array<Vec3, 3>& ta,
                                      const std::array<Vec3, 3>& tb) {
  ClosestPair best;
  best.distance = std::numeric_limits<double>::max();

  auto consider = [&](const Vec3& pa, const Vec3& pb) {
    const double d = (pa - pb).norm();
    if (d < best.distance) best = {d, pa, pb};
  };

  // 9 edge-edge pairs.
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const ClosestPair cp = segment_segment_closest(ta[i], ta[(i + 1) % 3], tb[j], tb[(j + 1) % 3]);
      consider(cp.point_a, cp.point_b);
    }
  }
  // 6 vertex-face pairs.
  for (int i = 0; i < 3; ++i) {
    consider(ta[i], closest_point_on_triangle(ta[i], tb[0], tb[1], tb[2]));
    consider(closest_point_on_triangle(tb[i], ta[0], ta[1], ta[2]), tb[i]);
  }
  // Proper crossings: an edge of one triangle piercing the other's interior.
  if (best.distance > 0.0) {
    for (int i = 0; i < 3; ++i) {
      if (auto hit = segment_triangle_hit(ta[i], ta[(i + 1) % 3], tb[0], tb[1], tb[2])) {
        best = {0.0, *hit, *hit};
        return best;
      }
      if (auto hit = segment_triangle_hit(tb[i], tb[(i + 1) % 3], ta[0], ta[1], ta[2])) {
        best = {0.0, *hit, *hit};
        return best;
      }
    }
  }
  return best;
}

}  // namespace figsim
