#include <atomic>
#include <fstream>

#include <nlohmann/json.hpp>

#include "figsim/error.hpp"
#include "figsim/fields/decimate.hpp"
#include "figsim/fields/marching_cubes.hpp"
#include "figsim/perception/perception.hpp"

namespace figsim {
namespace {

using nlohmann::json;

int fresh_object_id() {
  static std::atomic<int> next{1};
  return next.fetch_add(1);
}

//! Field with density forced to zero inside a carve-out box.
class CarvedField final : public DensityField {
 public:
  CarvedField(const DensityField& base, const Aabb& hole) : base_(base), hole_(hole) {}

  double density(const Vec3& x) const override {
    return hole_.contains(x) ? 0.0 : base_.density(x);
  }
  Vec3 color(const Vec3& x) const override { return base_.color(x); }
  bool has_color() const override { return base_.has_color(); }
  Aabb bounds() const override { return base_.bounds(); }

 private:
  const DensityField& base_;
  Aabb hole_;
};

PhysicalProperties props_from_json(const json& j, PhysicalProperties out) {
  if (j.contains("mass")) out.mass = j["mass"];
  if (j.contains("friction")) out.friction = j["friction"];
  if (j.contains("restitution")) out.restitution = j["restitution"];
  if (j.contains("static")) out.static_flag = j["static"];
  if (j.contains("kinematic")) out.kinematic = j["kinematic"];
  return out;
}

}  // namespace

TriMesh extract_object_mesh(const DensityField& field, const Aabb& volume,
                            const ExtractionConfig& cfg, int object_id) {
  TriMesh mesh = marching_cubes(field, volume, cfg.resolution, cfg.threshold);
  mesh = decimate(mesh, cfg.target_faces);
  mesh.object_id = object_id >= 0 ? object_id : fresh_object_id();
  return mesh;
}

TriMesh extract_passive_mesh(const DensityField& field, const Aabb& active_volume,
                             const ExtractionConfig& cfg, int object_id) {
  const Vec3 ext = active_volume.extent();
  Aabb volume = active_volume;
  volume.min.x -= 1.5 * ext.x;
  volume.max.x += 1.5 * ext.x;
  volume.min.y -= 1.5 * ext.y;
  volume.max.y += 1.5 * ext.y;
  volume.min.z -= 4.0 * ext.z;

  const CarvedField carved(field, active_volume);
  TriMesh mesh = marching_cubes(carved, volume, cfg.resolution, cfg.threshold);
  mesh = decimate(mesh, cfg.target_faces);
  mesh.object_id = object_id >= 0 ? object_id : fresh_object_id();
  return mesh;
}

SceneWithHistory build_scene_with_history(const ScenePair& pair) {
  SceneWithHistory out;

  SceneObject active;
  active.object_id = pair.active_mesh.object_id;
  active.ref_mesh = pair.active_mesh;
  active.props = pair.active_props;

  SceneObject passive;
  passive.object_id = pair.passive_mesh.object_id;
  passive.ref_mesh = pair.passive_mesh;
  passive.props = pair.passive_props;
  passive.props.static_flag = true;

  out.scene.objects = {active, passive};

  RigidTransform lifted;
  lifted.translation = {0, 0, pair.history_offset};
  out.prev = make_frame(out.scene, {lifted, RigidTransform::identity()});
  out.curr = make_frame(out.scene,
                        {RigidTransform::identity(), RigidTransform::identity()});
  return out;
}

SceneWithHistory perceive_scene(const DensityField& field, const MaskSet& views,
                                const ExtractionConfig& cfg,
                                const PhysicalProperties& active_props,
                                const PhysicalProperties& passive_props, double history_offset) {
  std::vector<std::vector<Vec3>> point_sets;
  point_sets.reserve(views.size());
  for (const MaskView& view : views) {
    point_sets.push_back(unproject_mask(view.mask, view.depth, view.camera));
  }
  ScenePair pair;
  pair.active_volume = bounding_volume(point_sets);
  // The surface samples bound the object tightly; the isosurface sits up to
  // a field voxel outside, so pad the extraction volume to keep it closed.
  const Aabb padded = pair.active_volume.expanded(0.1 * pair.active_volume.extent());
  pair.active_mesh = extract_object_mesh(field, padded, cfg);
  pair.passive_mesh = extract_passive_mesh(field, padded, cfg);
  pair.active_props = active_props;
  pair.passive_props = passive_props;
  pair.history_offset = history_offset;
  return build_scene_with_history(pair);
}

CameraModel read_camera_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("bad camera JSON in " + path + ": " + e.what());
  }
  CameraModel cam;
  cam.fx = j.at("fx");
  cam.fy = j.at("fy");
  cam.cx = j.at("cx");
  cam.cy = j.at("cy");
  cam.width = j.at("width");
  cam.height = j.at("height");
  if (j.contains("camera_to_world")) {
    const json& t = j["camera_to_world"];
    const auto& q = t.at("rotation");
    cam.camera_to_world.rotation = {q[0], q[1], q[2], q[3]};
    const auto& p = t.at("translation");
    cam.camera_to_world.translation = {p[0], p[1], p[2]};
  }
  if (!cam.valid()) throw InvalidSpec("invalid camera intrinsics in " + path);
  return cam;
}

void write_camera_json(const CameraModel& camera, const std::string& path) {
  const Quat& q = camera.camera_to_world.rotation;
  const Vec3& t = camera.camera_to_world.translation;
  const json j = {
      {"fx", camera.fx},
      {"fy", camera.fy},
      {"cx", camera.cx},
      {"cy", camera.cy},
      {"width", camera.width},
      {"height", camera.height},
      {"camera_to_world",
       {{"rotation", {q.w, q.x, q.y, q.z}}, {"translation", {t.x, t.y, t.z}}}},
  };
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

SceneManifest read_scene_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("bad manifest JSON in " + path + ": " + e.what());
  }
  SceneManifest m;
  m.field_path = j.at("field");
  for (const json& v : j.at("views")) {
    m.views.push_back({v.at("mask"), v.at("camera"), v.at("depth")});
  }
  if (j.contains("extraction")) {
    const json& e = j["extraction"];
    m.extraction.resolution = e.value("resolution", m.extraction.resolution);
    m.extraction.threshold = e.value("threshold", m.extraction.threshold);
    m.extraction.target_faces = e.value("target_faces", m.extraction.target_faces);
  }
  m.active_props = default_active_properties();
  m.passive_props = default_passive_properties();
  if (j.contains("active")) m.active_props = props_from_json(j["active"], m.active_props);
  if (j.contains("passive")) m.passive_props = props_from_json(j["passive"], m.passive_props);
  m.history_offset = j.value("history_offset", m.history_offset);
  return m;
}

}  // namespace figsim
