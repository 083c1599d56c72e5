#include "figsim/geometry/transform.hpp"

#include <numbers>

namespace figsim {

double rotation_error_deg(const RigidTransform& a, const RigidTransform& b) {
  return a.rotation.angle_to(b.rotation) * 180.0 / std::numbers::pi;
}

}  // namespace figsim
