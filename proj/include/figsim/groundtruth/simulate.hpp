#pragma once

#include <vector>

#include "figsim/scenegraph/scene.hpp"

namespace figsim {

struct BodyInit {
  RigidTransform pose;
  Vec3 velocity;          // linear, at the center of mass
  Vec3 angular_velocity;  // world frame
};

//! Rigid objects tossed above the floor plane z = 0.
struct SceneSpec {
  Scene scene;
  std::vector<BodyInit> initial;  // one per object
  double dt = 1.0 / 120.0;
  double gravity = 9.81;
  int steps = 100;
};

struct BodyKinematics {
  Vec3 velocity;
  Vec3 angular_velocity;
};

struct Trajectory {
  Scene scene;
  double dt = 1.0 / 120.0;
  double gravity = 9.81;
  std::vector<FrameState> frames;                       // steps + 1 entries
  std::vector<std::vector<BodyKinematics>> kinematics;  // aligned with frames
  std::vector<uint8_t> contact;                         // any impulse during step t -> t+1
};

//! Semi-implicit Euler with impulse contacts (floor halfspace, sphere-sphere,
//! convex deepest-vertex) and positional penetration projection.
Trajectory simulate(const SceneSpec& spec);

//! Kinetic + rotational + potential energy of the dynamic bodies at a frame,
//! with point-mass-at-vertices inertia.
double mechanical_energy(const Trajectory& trajectory, int frame);

}  // namespace figsim
