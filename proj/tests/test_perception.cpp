#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>

#include "figsim/error.hpp"
#include "figsim/fields/marching_cubes.hpp"
#include "figsim/fields/render.hpp"
#include "figsim/perception/perception.hpp"

using namespace figsim;

namespace {

CameraModel look_from(const Vec3& position, double yaw_deg) {
  CameraModel cam;
  cam.fx = cam.fy = 64;
  cam.cx = cam.cy = 32;
  cam.width = cam.height = 64;
  cam.camera_to_world.rotation = Quat::from_axis_angle({0, 1, 0}, yaw_deg * M_PI / 180.0);
  cam.camera_to_world.translation = position;
  return cam;
}

//! Render a view of the field and keep pixels whose density along the ray
//! crossed the mask field as active.
MaskView synthesize_view(const DensityField& object_field, const DensityField& scene_field,
                         const CameraModel& cam, double step) {
  const RenderResult obj = render(object_field, cam, std::nullopt, step);
  const RenderResult scene = render(scene_field, cam, std::nullopt, step);
  MaskView view;
  view.camera = cam;
  view.mask.width = cam.width;
  view.mask.height = cam.height;
  view.mask.active.assign(size_t(cam.width) * cam.height, 0);
  view.depth = scene.depth;
  for (int y = 0; y < cam.height; ++y) {
    for (int x = 0; x < cam.width; ++x) {
      const bool object_hit = obj.image.at(x, y)[3] > 0.99f;
      const bool unoccluded =
          object_hit && std::fabs(scene.depth.at(x, y) - obj.depth.at(x, y)) < 2 * step;
      if (unoccluded) view.mask.at(x, y) = 1;
    }
  }
  return view;
}

}  // namespace

TEST_CASE("unproject_mask pinhole arithmetic") {
  CameraModel cam;
  cam.fx = cam.fy = 1;
  cam.cx = cam.cy = 0;
  cam.width = 4;
  cam.height = 3;
  MaskImage mask;
  mask.width = 4;
  mask.height = 3;
  mask.active.assign(12, 0);
  mask.at(2, 1) = 1;
  mask.at(0, 0) = 1;
  DepthMap depth;
  depth.width = 4;
  depth.height = 3;
  depth.depth.assign(12, 3.0f);

  const auto points = unproject_mask(mask, depth, cam);
  REQUIRE(points.size() == 2);
  CHECK((points[0] - Vec3{0, 0, 3}).norm() < 1e-9);  // principal ray
  CHECK((points[1] - Vec3{6, 3, 3}).norm() < 1e-9);

  mask.active.assign(12, 0);
  CHECK_THROWS_AS(unproject_mask(mask, depth, cam), EmptyMask);
}

TEST_CASE("unproject_mask applies extrinsics") {
  CameraModel cam;
  cam.fx = cam.fy = 2;
  cam.cx = 1;
  cam.cy = 1;
  cam.width = cam.height = 2;
  cam.camera_to_world.rotation = Quat::from_axis_angle({0, 0, 1}, M_PI / 2);
  cam.camera_to_world.translation = {1, 2, 3};
  MaskImage mask;
  mask.width = mask.height = 2;
  mask.active = {0, 0, 0, 1};
  DepthMap depth;
  depth.width = depth.height = 2;
  depth.depth.assign(4, 4.0f);

  const auto points = unproject_mask(mask, depth, cam);
  const Vec3 cam_frame = cam.unproject(1, 1, 4.0);  // (0, 0, 4)
  const Vec3 expected = cam.camera_to_world.apply(cam_frame);
  CHECK((points[0] - expected).norm() < 1e-9);
  CHECK((points[0] - Vec3{1, 2, 7}).norm() < 1e-9);
}

TEST_CASE("bounding_volume min/max and monotonicity") {
  CHECK_THROWS_AS(bounding_volume({}), NoPoints);
  CHECK_THROWS_AS(bounding_volume({{}}), NoPoints);

  const Aabb one = bounding_volume({{{0, 0, 0}, {1, 2, 3}}});
  CHECK((one.min - Vec3{0, 0, 0}).norm() == 0.0);
  CHECK((one.max - Vec3{1, 2, 3}).norm() == 0.0);

  const std::vector<Vec3> a{{0, 0, 0}, {1, 1, 1}};
  const std::vector<Vec3> b{{-1, 0.5, 0.5}, {0.5, 2, 0.5}};
  const Aabb split = bounding_volume({a, b});
  std::vector<Vec3> merged = a;
  merged.insert(merged.end(), b.begin(), b.end());
  const Aabb joint = bounding_volume({merged});
  CHECK((split.min - joint.min).norm() == 0.0);
  CHECK((split.max - joint.max).norm() == 0.0);

  const Aabb grown = bounding_volume({a, b, {{5, 5, 5}}});
  CHECK(grown.min.x <= split.min.x);
  CHECK(grown.max.x >= split.max.x);
  CHECK(grown.contains({5, 5, 5}));
}

TEST_CASE("render and unproject round trip on a sphere") {
  SphereField sphere({0, 0, 0}, 0.5, 500.0);
  const double step = 0.01;
  const CameraModel cam = look_from({0, 0, -3}, 0.0);
  const RenderResult r = render(sphere, cam, std::nullopt, step);

  MaskImage mask;
  mask.width = cam.width;
  mask.height = cam.height;
  mask.active.assign(size_t(cam.width) * cam.height, 0);
  for (int y = 0; y < cam.height; ++y) {
    for (int x = 0; x < cam.width; ++x) {
      if (r.image.at(x, y)[3] > 0.99f) mask.at(x, y) = 1;
    }
  }
  const auto points = unproject_mask(mask, r.depth, cam);
  REQUIRE(points.size() > 100);
  for (const Vec3& p : points) {
    CHECK(std::fabs(p.norm() - 0.5) <= 2 * step);
  }
}

TEST_CASE("two orthogonal views bound a sphere") {
  SphereField sphere({0, 0, 0}, 0.5, 500.0);
  const double step = 0.01;
  std::vector<std::vector<Vec3>> sets;
  for (double yaw : {0.0, 90.0}) {
    const Vec3 pos = yaw == 0.0 ? Vec3{0, 0, -3} : Vec3{-3, 0, 0};
    const CameraModel cam = look_from(pos, yaw);
    const RenderResult r = render(sphere, cam, std::nullopt, step);
    MaskImage mask;
    mask.width = cam.width;
    mask.height = cam.height;
    mask.active.assign(size_t(cam.width) * cam.height, 0);
    for (int y = 0; y < cam.height; ++y) {
      for (int x = 0; x < cam.width; ++x) {
        if (r.image.at(x, y)[3] > 0.99f) mask.at(x, y) = 1;
      }
    }
    sets.push_back(unproject_mask(mask, r.depth, cam));
  }
  const Aabb box = bounding_volume(sets);
  const double eps = 2 * step;
  CHECK(box.min.x >= -0.5 - eps);
  CHECK(box.min.y >= -0.5 - eps);
  CHECK(box.min.z >= -0.5 - eps);
  CHECK(box.max.x <= 0.5 + eps);
  CHECK(box.max.y <= 0.5 + eps);
  CHECK(box.max.z <= 0.5 + eps);
  // the visible hemispheres must span most of the sphere
  CHECK(box.extent().x > 0.8);
  CHECK(box.extent().z > 0.8);
}

TEST_CASE("extract_object_mesh sphere oracle") {
  SphereField sphere({0, 0, 0}, 0.5);
  const Aabb volume{{-0.7, -0.7, -0.7}, {0.7, 0.7, 0.7}};
  ExtractionConfig cfg;
  cfg.resolution = 48;
  cfg.target_faces = 500;
  const TriMesh mesh = extract_object_mesh(sphere, volume, cfg);
  CHECK(mesh.faces.size() <= 500);
  CHECK(mesh.object_id > 0);
  double mean_r = 0.0;
  for (const Vec3& v : mesh.vertices) mean_r += v.norm();
  mean_r /= double(mesh.vertices.size());
  CHECK(std::fabs(mean_r - 0.5) <= 0.05 * 0.5);

  cfg.target_faces = 1000000;
  const TriMesh raw = extract_object_mesh(sphere, volume, cfg);
  const TriMesh mc = marching_cubes(sphere, volume, cfg.resolution, cfg.threshold);
  CHECK(raw.faces.size() == mc.faces.size());
}

TEST_CASE("extract_object_mesh box corners present") {
  BoxField box({{-0.4, -0.3, -0.2}, {0.4, 0.3, 0.2}});
  const Aabb volume{{-0.6, -0.6, -0.6}, {0.6, 0.6, 0.6}};
  ExtractionConfig cfg;
  cfg.resolution = 48;
  cfg.target_faces = 1000000;
  const TriMesh mesh = extract_object_mesh(box, volume, cfg);
  const double cell = 1.2 / (cfg.resolution - 1);
  for (const double sx : {-0.4, 0.4}) {
    for (const double sy : {-0.3, 0.3}) {
      for (const double sz : {-0.2, 0.2}) {
        const Vec3 corner{sx, sy, sz};
        double best = 1e9;
        for (const Vec3& v : mesh.vertices) best = std::min(best, (v - corner).norm());
        CHECK(best <= cell * std::sqrt(3.0));
      }
    }
  }
}

TEST_CASE("extract_passive_mesh finds the support plane") {
  auto sphere = std::make_shared<SphereField>(Vec3{0, 0, 0.6}, 0.5);
  auto slab = std::make_shared<BoxField>(Aabb{{-10, -10, -0.5}, {10, 10, 0.0}});
  UnionField world({sphere, slab});
  const Aabb active_volume{{-0.55, -0.55, 0.05}, {0.55, 0.55, 1.15}};
  ExtractionConfig cfg;
  cfg.resolution = 48;
  cfg.target_faces = 2000;

  const TriMesh passive = extract_passive_mesh(world, active_volume, cfg);
  REQUIRE(!passive.vertices.empty());

  // top-surface vertices sit near z = 0 (within two grid cells)
  const Aabb pv = [&] {
    const Vec3 ext = active_volume.extent();
    Aabb v = active_volume;
    v.min.x -= 1.5 * ext.x;
    v.max.x += 1.5 * ext.x;
    v.min.y -= 1.5 * ext.y;
    v.max.y += 1.5 * ext.y;
    v.min.z -= 4.0 * ext.z;
    return v;
  }();
  const double cell = pv.extent().z / (cfg.resolution - 1);
  int top_count = 0;
  for (const Vec3& v : passive.vertices) {
    if (v.z > -0.1) {
      CHECK(std::fabs(v.z - 0.0) <= 2 * cell);
      ++top_count;
    }
  }
  CHECK(top_count > 0);

  // no passive vertex intrudes into the (shrunken) active volume
  const double shrink = cell;
  const Aabb inner{active_volume.min + Vec3{shrink, shrink, shrink},
                   active_volume.max - Vec3{shrink, shrink, shrink}};
  for (const Vec3& v : passive.vertices) CHECK(!inner.contains(v));

  BoxField empty({{-1, -1, -1}, {1, 1, 1}}, 0.0);
  CHECK_THROWS_AS(extract_passive_mesh(empty, active_volume, cfg), EmptySurface);
}

TEST_CASE("build_scene_with_history velocity features") {
  ScenePair pair;
  pair.active_mesh = make_icosphere(0.5, 1);
  pair.active_mesh.object_id = 7;
  pair.passive_mesh = make_box({2, 2, 0.1});
  pair.passive_mesh.object_id = 8;
  pair.history_offset = 0.01;
  pair.active_props = default_active_properties();
  pair.passive_props = default_passive_properties();

  const SceneWithHistory s = build_scene_with_history(pair);
  REQUIRE(s.scene.objects.size() == 2);
  CHECK(s.scene.objects[1].props.static_flag);
  CHECK(s.scene.objects[0].object_id != s.scene.objects[1].object_id);

  const auto& prev_a = s.prev.objects[0].vertices;
  const auto& curr_a = s.curr.objects[0].vertices;
  REQUIRE(prev_a.size() == curr_a.size());
  for (size_t i = 0; i < curr_a.size(); ++i) {
    const Vec3 vel = curr_a[i] - prev_a[i];
    CHECK((vel - Vec3{0, 0, -0.01}).norm() < 1e-12);
  }
  for (size_t i = 0; i < s.curr.objects[1].vertices.size(); ++i) {
    CHECK((s.curr.objects[1].vertices[i] - s.prev.objects[1].vertices[i]).norm() == 0.0);
  }

  pair.history_offset = 0.0;
  const SceneWithHistory still = build_scene_with_history(pair);
  for (size_t i = 0; i < still.curr.objects[0].vertices.size(); ++i) {
    CHECK((still.curr.objects[0].vertices[i] - still.prev.objects[0].vertices[i]).norm() == 0.0);
  }
}

TEST_CASE("full pipeline is deterministic") {
  auto sphere = std::make_shared<SphereField>(Vec3{0, 0, 0.6}, 0.45, 500.0);
  auto slab = std::make_shared<BoxField>(Aabb{{-10, -10, -0.5}, {10, 10, 0.0}}, 500.0);
  UnionField world({sphere, slab});

  // cameras at slab-sphere height looking horizontally (+y and +x)
  CameraModel cam_y = look_from({0, -3, 0.6}, 0.0);
  cam_y.camera_to_world.rotation = Quat::from_axis_angle({1, 0, 0}, -M_PI / 2);
  CameraModel cam_x = look_from({-3, 0, 0.6}, 90.0);

  MaskSet views;
  views.push_back(synthesize_view(*sphere, world, cam_y, 0.01));
  views.push_back(synthesize_view(*sphere, world, cam_x, 0.01));

  ExtractionConfig cfg;
  cfg.resolution = 32;
  cfg.target_faces = 400;
  const auto a = perceive_scene(world, views, cfg, default_active_properties(),
                                default_passive_properties(), 0.01);
  const auto b = perceive_scene(world, views, cfg, default_active_properties(),
                                default_passive_properties(), 0.01);
  REQUIRE(a.scene.objects.size() == 2);
  CHECK(a.scene.objects[0].ref_mesh.vertices == b.scene.objects[0].ref_mesh.vertices);
  CHECK(a.scene.objects[0].ref_mesh.faces == b.scene.objects[0].ref_mesh.faces);
  CHECK(a.scene.objects[1].ref_mesh.vertices == b.scene.objects[1].ref_mesh.vertices);

  // the active mesh approximates the sphere
  double mean_r = 0.0;
  const auto& verts = a.scene.objects[0].ref_mesh.vertices;
  for (const Vec3& v : verts) mean_r += (v - Vec3{0, 0, 0.6}).norm();
  mean_r /= double(verts.size());
  CHECK(std::fabs(mean_r - 0.45) <= 0.1 * 0.45);
}

TEST_CASE("camera json round trip") {
  CameraModel cam;
  cam.fx = 128.5;
  cam.fy = 127.25;
  cam.cx = 63.5;
  cam.cy = 62.5;
  cam.width = 128;
  cam.height = 126;
  cam.camera_to_world.rotation = Quat::from_axis_angle({0.3, 0.5, 0.8}, 1.1);
  cam.camera_to_world.translation = {0.25, -1.5, 2.75};
  const auto path = std::filesystem::temp_directory_path() / "figsim_cam.json";
  write_camera_json(cam, path.string());
  const CameraModel back = read_camera_json(path.string());
  CHECK(back.fx == cam.fx);
  CHECK(back.fy == cam.fy);
  CHECK(back.cx == cam.cx);
  CHECK(back.cy == cam.cy);
  CHECK(back.width == cam.width);
  CHECK(back.height == cam.height);
  CHECK(rotation_error_deg(back.camera_to_world, cam.camera_to_world) < 1e-9);
  CHECK((back.camera_to_world.translation - cam.camera_to_world.translation).norm() < 1e-12);
  std::filesystem::remove(path);
}

TEST_CASE("scene manifest parsing") {
  const auto path = std::filesystem::temp_directory_path() / "figsim_manifest.json";
  {
    std::ofstream out(path);
    out << R"({
      "field": "grid.bin",
      "views": [
        {"mask": "m0.pgm", "camera": "c0.json", "depth": "d0.pgm"},
        {"mask": "m1.pgm", "camera": "c1.json", "depth": "d1.pgm"}
      ],
      "extraction": {"resolution": 48, "target_faces": 800},
      "active": {"mass": 0.002, "restitution": 0.4},
      "history_offset": 0.005
    })";
  }
  const SceneManifest m = read_scene_manifest(path.string());
  CHECK(m.field_path == "grid.bin");
  REQUIRE(m.views.size() == 2);
  CHECK(m.views[1].camera_path == "c1.json");
  CHECK(m.extraction.resolution == 48);
  CHECK(m.extraction.threshold == 0.5);
  CHECK(m.extraction.target_faces == 800);
  CHECK(m.active_props.mass == 0.002);
  CHECK(m.active_props.restitution == 0.4);
  CHECK(m.active_props.friction == 0.5);
  CHECK(m.passive_props.mass == 0.0);
  CHECK(m.passive_props.static_flag);
  CHECK(m.history_offset == 0.005);
  std::filesystem::remove(path);
}
