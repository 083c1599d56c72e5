#pragma once

#include "figsim/geometry/quat.hpp"
#include "figsim/geometry/vec3.hpp"

namespace figsim {

//! Rigid transform x -> rotate(q, x) + t.
struct RigidTransform {
  Quat rotation;
  Vec3 translation;

  static RigidTransform identity() { return {}; }

  Vec3 apply(const Vec3& p) const { return rotation.rotate(p) + translation; }

  RigidTransform inverse() const {
    const Quat qi = rotation.conjugate();
    return {qi, -qi.rotate(translation)};
  }

  //! Composition: (a.compose(b))(x) = a(b(x)).
  RigidTransform compose(const RigidTransform& other) const {
    return {(rotation * other.rotation).normalized(), rotation.rotate(other.translation) + translation};
  }
};

double rotation_error_deg(const RigidTransform& a, const RigidTransform& b);

}  // namespace figsim
