#pragma once

#include "figsim/geometry/trimesh.hpp"

namespace figsim {

//! Quadric-error edge-collapse simplification down to at most `target_faces`.
//! Boundary edges get constraint quadrics; collapses that flip an incident
//! face normal are rejected. Meshes already at or below target are returned
//! unchanged.
TriMesh decimate(const TriMesh& mesh, int target_faces);

}  // namespace figsim
