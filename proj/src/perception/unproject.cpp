#include <limits>

#include "figsim/error.hpp"
#include "figsim/perception/perception.hpp"

namespace figsim {

std::vector<Vec3> unproject_mask(const MaskImage& mask, const DepthMap& depth,
                                 const CameraModel& camera) {
  if (mask.width != camera.width || mask.height != camera.height ||
      depth.width != camera.width || depth.height != camera.height) {
    throw InvalidSpec("unproject_mask: mask/depth/camera dimensions disagree");
  }
  std::vector<Vec3> points;
  for (int v = 0; v < mask.height; ++v) {
    for (int u = 0; u < mask.width; ++u) {
      if (!mask.at(u, v)) continue;
      const double z = depth.at(u, v);
      if (z <= 0.0) throw InvalidSpec("unproject_mask: non-positive depth at active pixel");
      points.push_back(camera.camera_to_world.apply(camera.unproject(u, v, z)));
    }
  }
  if (points.empty()) throw EmptyMask("unproject_mask: no active pixels");
  return points;
}

Aabb bounding_volume(const std::vector<std::vector<Vec3>>& point_sets) {
  Aabb box;
  bool any = false;
  for (const auto& set : point_sets) {
    for (const Vec3& p : set) {
      box.extend(p);
      any = true;
    }
  }
  if (!any) throw NoPoints("bounding_volume: no points");
  return box;
}

}  // namespace figsim
