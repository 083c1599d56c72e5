#pragma once

#include <cmath>

#include "figsim/geometry/vec3.hpp"

namespace figsim {

//! Unit quaternion, Hamilton convention (w + xi + yj + zk).
struct Quat {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Quat() = default;
  constexpr Quat(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

  static Quat identity() { return {}; }

  static Quat from_axis_angle(const Vec3& axis, double angle_rad) {
    const Vec3 a = axis.normalized();
    const double h = 0.5 * angle_rad;
    const double s = std::sin(h);
    return {std::cos(h), a.x * s, a.y * s, a.z * s};
  }

  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

  Quat normalized() const {
    const double n = norm();
    return {w / n, x / n, y / n, z / n};
  }

  constexpr Quat conjugate() const { return {w, -x, -y, -z}; }

  //! Hamilton product; this * o rotates by o first, then this.
  constexpr Quat operator*(const Quat& o) const {
    return {w * o.w - x * o.x - y * o.y - z * o.z,
            w * o.x + x * o.w + y * o.z - z * o.y,
            w * o.y - x * o.z + y * o.w + z * o.x,
            w * o.z + x * o.y - y * o.x + z * o.w};
  }

  Vec3 rotate(const Vec3& v) const {
    // q v q^-1 expanded with two cross products.
    const Vec3 u{x, y, z};
    const Vec3 t = 2.0 * u.cross(v);
    return v + w * t + u.cross(t);
  }

  constexpr double dot(const Quat& o) const { return w * o.w + x * o.x + y * o.y + z * o.z; }

  //! Geodesic angle to another unit quaternion, in radians; sign-invariant.
  //! atan2 form stays accurate for very small angles where acos degrades.
  double angle_to(const Quat& o) const {
    const Quat r = conjugate() * o;
    const double s = std::sqrt(r.x * r.x + r.y * r.y + r.z * r.z);
    return 2.0 * std::atan2(s, std::fabs(r.w));
  }

  bool is_finite() const {
    return std::isfinite(w) && std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

}  // namespace figsim
