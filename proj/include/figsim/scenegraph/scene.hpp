#pragma once

#include <vector>

#include "figsim/geometry/transform.hpp"
#include "figsim/geometry/trimesh.hpp"

namespace figsim {

//! Per-object physical properties p_i plus the static/kinematic indicators.
struct PhysicalProperties {
  double mass = 1e-3;
  double friction = 0.5;
  double restitution = 0.5;
  bool static_flag = false;  // a_i
  bool kinematic = false;    // k_i
};

inline PhysicalProperties default_active_properties() { return {1e-3, 0.5, 0.5, false, false}; }
inline PhysicalProperties default_passive_properties() { return {0.0, 0.5, 0.3, true, true}; }

//! Immutable object description shared by all frames.
struct SceneObject {
  int object_id = 0;
  TriMesh ref_mesh;  // reference-frame geometry; object_id mirrors the mesh tag
  PhysicalProperties props;
};

struct Scene {
  std::vector<SceneObject> objects;
};

//! Pose and world-space vertices of one object at one timestep.
struct ObjectState {
  RigidTransform pose;
  std::vector<Vec3> vertices;
};

struct FrameState {
  std::vector<ObjectState> objects;
};

//! World-space vertices of object `i` under its pose in `frame`.
FrameState make_frame(const Scene& scene, const std::vector<RigidTransform>& poses);

}  // namespace figsim
