#pragma once

#include "figsim/geometry/transform.hpp"
#include "figsim/geometry/vec3.hpp"

namespace figsim {

//! Pinhole camera. Extrinsics map camera frame to world frame.
//! Camera frame: +x right, +y down, +z forward (depth).
struct CameraModel {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 1;
  int height = 1;
  RigidTransform camera_to_world;

  //! Camera-frame point for pixel (u, v) at depth z.
  Vec3 unproject(double u, double v, double z) const {
    return {z * (u - cx) / fx, z * (v - cy) / fy, z};
  }

  //! World-space ray through pixel (u, v); direction normalized.
  void pixel_ray(double u, double v, Vec3& origin, Vec3& dir) const {
    origin = camera_to_world.translation;
    dir = camera_to_world.rotation.rotate(Vec3{(u - cx) / fx, (v - cy) / fy, 1.0}).normalized();
  }

  bool valid() const {
    return fx > 0 && fy > 0 && width > 0 && height > 0 && cx >= 0 && cx < width && cy >= 0 &&
           cy < height;
  }
};

}  // namespace figsim
