#pragma once

#include <string>
#include <utility>
#include <vector>

#include "figsim/fields/camera.hpp"
#include "figsim/fields/density_field.hpp"
#include "figsim/fields/image_io.hpp"
#include "figsim/geometry/aabb.hpp"
#include "figsim/geometry/trimesh.hpp"
#include "figsim/scenegraph/scene.hpp"

namespace figsim {

//! One segmented view: binary mask, metric depth, and the camera that saw it.
struct MaskView {
  MaskImage mask;
  DepthMap depth;
  CameraModel camera;
};

using MaskSet = std::vector<MaskView>;

struct ExtractionConfig {
  int resolution = 64;       // marching-cubes grid points per axis
  double threshold = 0.5;    // density iso level
  int target_faces = 1000;   // decimation budget n_f
};

//! World-frame points for every active mask pixel: z * K^-1 (u, v, 1)^T
//! in the camera frame, then through the extrinsics.
std::vector<Vec3> unproject_mask(const MaskImage& mask, const DepthMap& depth,
                                 const CameraModel& camera);

//! Componentwise min/max over the union of all point sets.
Aabb bounding_volume(const std::vector<std::vector<Vec3>>& point_sets);

//! Isosurface of the field inside `volume`, decimated to cfg.target_faces.
//! The mesh gets a fresh object_id unless `object_id` >= 0.
TriMesh extract_object_mesh(const DensityField& field, const Aabb& volume,
                            const ExtractionConfig& cfg, int object_id = -1);

//! Isosurface of the environment around (mostly below) the active volume.
//! Density inside `active_volume` is masked out so only the support
//! surface and surroundings remain.
TriMesh extract_passive_mesh(const DensityField& field, const Aabb& active_volume,
                             const ExtractionConfig& cfg, int object_id = -1);

struct ScenePair {
  TriMesh active_mesh;
  TriMesh passive_mesh;
  Aabb active_volume;
  double history_offset = kDefaultHistoryOffset;  // delta z, meters
  PhysicalProperties active_props;
  PhysicalProperties passive_props;

  // one ground-truth timestep of free-fall displacement, g * dt^2 at dt = 1/120
  static constexpr double kDefaultHistoryOffset = 9.81 / (120.0 * 120.0);
};

struct SceneWithHistory {
  Scene scene;
  FrameState prev;  // active object lifted by delta z
  FrameState curr;  // extracted poses
};

//! Two-frame history that encodes a downward velocity of delta z per step
//! for the active object and zero motion for the passive environment.
SceneWithHistory build_scene_with_history(const ScenePair& pair);

//! Camera JSON: {fx, fy, cx, cy, width, height,
//!               camera_to_world: {rotation: [w,x,y,z], translation: [x,y,z]}}
CameraModel read_camera_json(const std::string& path);
void write_camera_json(const CameraModel& camera, const std::string& path);

//! Scene manifest: density field file plus mask/camera/depth triples and
//! extraction / physics settings for the full pipeline.
struct SceneManifest {
  std::string field_path;
  struct View {
    std::string mask_path;
    std::string camera_path;
    std::string depth_path;
  };
  std::vector<View> views;
  ExtractionConfig extraction;
  PhysicalProperties active_props;
  PhysicalProperties passive_props;
  double history_offset = ScenePair::kDefaultHistoryOffset;
};

SceneManifest read_scene_manifest(const std::string& path);

//! Full pipeline: unproject all views, bound the active object, extract
//! active and passive meshes, synthesize the two-frame history.
SceneWithHistory perceive_scene(const DensityField& field, const MaskSet& views,
                                const ExtractionConfig& cfg,
                                const PhysicalProperties& active_props,
                                const PhysicalProperties& passive_props, double history_offset);

}  // namespace figsim
