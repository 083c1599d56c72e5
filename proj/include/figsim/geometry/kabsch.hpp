#pragma once

#include <vector>

#include "figsim/geometry/transform.hpp"
#include "figsim/geometry/vec3.hpp"

namespace figsim {

//! Least-squares rigid fit T minimizing sum ||T(src_i) - dst_i||^2.
//! The rotation is a proper rotation (det = +1), never a reflection.
//! Throws DegenerateFit on count mismatch, fewer than 3 points, or collinear input.
RigidTransform kabsch_fit(const std::vector<Vec3>& src, const std::vector<Vec3>& dst);

}  // namespace figsim
