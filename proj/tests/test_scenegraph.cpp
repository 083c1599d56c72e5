#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "figsim/error.hpp"
#include "figsim/scenegraph/graph.hpp"

using namespace figsim;

namespace {

Scene two_tetrahedra(double separation) {
  Scene scene;
  SceneObject a;
  a.object_id = 1;
  a.ref_mesh = make_tetrahedron();
  a.ref_mesh.object_id = 1;
  a.props = default_active_properties();
  SceneObject b = a;
  b.object_id = 2;
  b.ref_mesh.object_id = 2;
  for (auto& v : b.ref_mesh.vertices) v.x += separation;
  scene.objects = {a, b};
  return scene;
}

FrameState rest_frame(const Scene& scene) {
  return make_frame(scene, std::vector<RigidTransform>(scene.objects.size()));
}

}  // namespace

TEST_CASE("two distant tetrahedra, fignet mode") {
  const Scene scene = two_tetrahedra(10.0);
  const FrameState f = rest_frame(scene);
  const SceneGraph g = build_graph(scene, f, f, GraphMode::kFignet, 0.5);

  CHECK(g.num_mesh_nodes() == 8);
  CHECK(g.num_object_nodes() == 2);
  CHECK(g.node_node.count() == 24);  // 6 undirected mesh edges per tet, both directions
  CHECK(g.vert_to_obj.count() + g.obj_to_vert.count() == 16);
  CHECK(g.face_face_count() == 0);

  const GraphStats s = graph_stats(g);
  CHECK(s.node_node_edges == 24);
  CHECK(s.object_node_edges == 16);
  CHECK(s.face_face_edges == 0);
  CHECK(s.total_edges == 40);
  CHECK(s.total_edges == s.node_node_edges + s.object_node_edges + s.face_face_edges);
}

TEST_CASE("two distant tetrahedra, fignet_star mode") {
  const Scene scene = two_tetrahedra(10.0);
  const FrameState f = rest_frame(scene);
  const SceneGraph g = build_graph(scene, f, f, GraphMode::kFignetStar, 0.5);
  CHECK(g.node_node.count() == 0);
  CHECK(g.vert_to_obj.count() + g.obj_to_vert.count() == 16);
  CHECK(g.face_face_count() == 0);
  CHECK(graph_stats(g).total_edges == 16);
}

TEST_CASE("close tetrahedra grow face-face edges") {
  const Scene scene = two_tetrahedra(2.05);  // closest edges 0.05 apart
  const FrameState f = rest_frame(scene);
  const SceneGraph g = build_graph(scene, f, f, GraphMode::kFignet, 0.1);
  CHECK(g.face_face_count() >= 2);
  CHECK(g.face_face_count() % 2 == 0);  // two directed messages per pair

  // every face-face edge crosses objects
  for (const FaceFaceEdge& e : g.face_face) {
    const int so = g.mesh_node_object[e.sender_verts[0]];
    const int ro = g.mesh_node_object[e.receiver_verts[0]];
    CHECK(so != ro);
    for (int k = 1; k < 3; ++k) {
      CHECK(g.mesh_node_object[e.sender_verts[k]] == so);
      CHECK(g.mesh_node_object[e.receiver_verts[k]] == ro);
    }
  }
}

TEST_CASE("mode identity: star equals fignet minus node-node") {
  const Scene scene = two_tetrahedra(2.05);
  RigidTransform moved;
  moved.translation = {0, 0, 0.01};
  const FrameState prev = rest_frame(scene);
  const FrameState curr = make_frame(scene, {moved, RigidTransform::identity()});

  const SceneGraph full = build_graph(scene, curr, prev, GraphMode::kFignet, 0.1);
  const SceneGraph star = build_graph(scene, curr, prev, GraphMode::kFignetStar, 0.1);

  CHECK(star.node_node.count() == 0);
  CHECK(star.mesh_node_features == full.mesh_node_features);
  CHECK(star.object_node_features == full.object_node_features);
  CHECK(star.vert_to_obj.senders == full.vert_to_obj.senders);
  CHECK(star.vert_to_obj.features == full.vert_to_obj.features);
  CHECK(star.obj_to_vert.receivers == full.obj_to_vert.receivers);
  CHECK(star.obj_to_vert.features == full.obj_to_vert.features);
  CHECK(star.face_face_features == full.face_face_features);
  REQUIRE(star.face_face.size() == full.face_face.size());
  for (size_t i = 0; i < star.face_face.size(); ++i) {
    CHECK(star.face_face[i].sender_verts == full.face_face[i].sender_verts);
    CHECK(star.face_face[i].receiver_verts == full.face_face[i].receiver_verts);
  }

  const GraphStats sf = graph_stats(full);
  const GraphStats ss = graph_stats(star);
  CHECK(ss.total_edges == sf.total_edges - sf.node_node_edges);
}

TEST_CASE("translation invariance of features") {
  const Scene scene = two_tetrahedra(2.05);
  RigidTransform moved;
  moved.translation = {0.002, -0.001, 0.01};
  const FrameState prev = rest_frame(scene);
  const FrameState curr = make_frame(scene, {moved, RigidTransform::identity()});
  const SceneGraph base = build_graph(scene, curr, prev, GraphMode::kFignet, 0.1);

  RigidTransform shift;
  shift.translation = {3.5, -2.25, 7.0};
  auto shifted = [&](const FrameState& f) {
    FrameState out = f;
    for (auto& obj : out.objects) {
      obj.pose.translation = obj.pose.translation + shift.translation;
      for (auto& v : obj.vertices) v = v + shift.translation;
    }
    return out;
  };
  const SceneGraph moved_graph =
      build_graph(scene, shifted(curr), shifted(prev), GraphMode::kFignet, 0.1);

  auto approx_equal = [](const std::vector<double>& a, const std::vector<double>& b) {
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-9));
  };
  approx_equal(moved_graph.mesh_node_features, base.mesh_node_features);
  approx_equal(moved_graph.object_node_features, base.object_node_features);
  approx_equal(moved_graph.node_node.features, base.node_node.features);
  approx_equal(moved_graph.vert_to_obj.features, base.vert_to_obj.features);
  approx_equal(moved_graph.obj_to_vert.features, base.obj_to_vert.features);
  approx_equal(moved_graph.face_face_features, base.face_face_features);
}

TEST_CASE("face-face count symmetric under object swap") {
  Scene scene = two_tetrahedra(2.05);
  const FrameState f = rest_frame(scene);
  const SceneGraph g1 = build_graph(scene, f, f, GraphMode::kFignetStar, 0.1);

  std::swap(scene.objects[0], scene.objects[1]);
  const FrameState f2 = rest_frame(scene);
  const SceneGraph g2 = build_graph(scene, f2, f2, GraphMode::kFignetStar, 0.1);
  CHECK(g1.face_face_count() == g2.face_face_count());
}

TEST_CASE("floor-only scene has no collision edges") {
  Scene scene;
  SceneObject floor;
  floor.object_id = 1;
  floor.ref_mesh = make_box({5, 5, 0.1});
  floor.ref_mesh.object_id = 1;
  floor.props = default_passive_properties();
  scene.objects = {floor};
  const FrameState f = rest_frame(scene);
  const SceneGraph g = build_graph(scene, f, f, GraphMode::kFignet, 0.5);
  CHECK(g.face_face_count() == 0);
  CHECK(g.num_object_nodes() == 1);
  // static flag propagated
  CHECK(g.mesh_node_features[6] == 1.0);
}

TEST_CASE("icosphere pair: node-node edges dominate fignet total") {
  Scene scene;
  SceneObject a;
  a.object_id = 1;
  a.ref_mesh = make_icosphere(0.5, 3);  // 1280 faces
  a.ref_mesh.object_id = 1;
  a.props = default_active_properties();
  SceneObject b = a;
  b.object_id = 2;
  b.ref_mesh.object_id = 2;
  for (auto& v : b.ref_mesh.vertices) v.x += 1.02;
  scene.objects = {a, b};
  REQUIRE(a.ref_mesh.faces.size() == 1280);

  const FrameState f = rest_frame(scene);
  const SceneGraph g = build_graph(scene, f, f, GraphMode::kFignet, 0.05);
  const GraphStats s = graph_stats(g);
  CHECK(s.node_node_edges > s.total_edges / 2);

  const SceneGraph star = build_graph(scene, f, f, GraphMode::kFignetStar, 0.05);
  const GraphStats ss = graph_stats(star);
  CHECK(ss.total_edges == s.total_edges - s.node_node_edges);
  CHECK(ss.feature_memory_bytes < s.feature_memory_bytes);
}

TEST_CASE("velocity and property features") {
  const Scene scene = two_tetrahedra(10.0);
  RigidTransform moved;
  moved.translation = {0, 0, -0.01};
  const FrameState prev = rest_frame(scene);
  const FrameState curr = make_frame(scene, {moved, RigidTransform::identity()});
  const SceneGraph g = build_graph(scene, curr, prev, GraphMode::kFignetStar, 0.5);

  for (int n = 0; n < 4; ++n) {
    CHECK(g.mesh_node_features[n * kNodeFeatureWidth + 0] == 0.0);
    CHECK(g.mesh_node_features[n * kNodeFeatureWidth + 2] == doctest::Approx(-0.01));
    CHECK(g.mesh_node_features[n * kNodeFeatureWidth + 3] == doctest::Approx(1e-3));
    CHECK(g.mesh_node_features[n * kNodeFeatureWidth + 4] == doctest::Approx(0.5));
    CHECK(g.mesh_node_features[n * kNodeFeatureWidth + 6] == 0.0);  // a_i
    CHECK(g.mesh_node_features[n * kNodeFeatureWidth + 7] == 0.0);  // f_i
  }
  for (int n = 4; n < 8; ++n) {
    CHECK(g.mesh_node_features[n * kNodeFeatureWidth + 2] == 0.0);
  }
  CHECK(g.object_node_features[2] == doctest::Approx(-0.01));

  // object-node features: vertex -> center offset and norm
  const Vec3 center = g.object_node_positions[0];
  const Vec3 x0 = g.mesh_node_positions[0];
  CHECK(g.vert_to_obj.features[0] == doctest::Approx((center - x0).x));
  CHECK(g.vert_to_obj.features[3] == doctest::Approx((center - x0).norm()));
  CHECK(g.obj_to_vert.features[0] == doctest::Approx((x0 - center).x));
}

TEST_CASE("topology mismatch detection") {
  const Scene scene = two_tetrahedra(10.0);
  FrameState f = rest_frame(scene);
  FrameState bad = f;
  bad.objects[0].vertices.pop_back();
  CHECK_THROWS_AS(build_graph(scene, bad, f, GraphMode::kFignet, 0.5), TopologyMismatch);
  bad = f;
  bad.objects.pop_back();
  CHECK_THROWS_AS(build_graph(scene, f, bad, GraphMode::kFignet, 0.5), TopologyMismatch);
}

TEST_CASE("deterministic construction and JSON dump") {
  const Scene scene = two_tetrahedra(2.05);
  const FrameState f = rest_frame(scene);
  const SceneGraph a = build_graph(scene, f, f, GraphMode::kFignet, 0.1);
  const SceneGraph b = build_graph(scene, f, f, GraphMode::kFignet, 0.1);
  CHECK(a.node_node.senders == b.node_node.senders);
  CHECK(a.node_node.features == b.node_node.features);
  CHECK(a.face_face_features == b.face_face_features);

  const auto path = std::filesystem::temp_directory_path() / "figsim_graph.json";
  write_graph_json(a, path.string());
  std::ifstream in(path);
  nlohmann::json j;
  in >> j;
  CHECK(j["mode"] == "fignet");
  CHECK(j["stats"]["total_edges"] ==
        a.node_node.count() + a.vert_to_obj.count() + a.obj_to_vert.count() +
            a.face_face_count());
  CHECK(j["mesh_node_positions"].size() == 8);
  std::filesystem::remove(path);
}

TEST_CASE("graph mode parsing") {
  CHECK(parse_graph_mode("fignet") == GraphMode::kFignet);
  CHECK(parse_graph_mode("fignet_star") == GraphMode::kFignetStar);
  CHECK_THROWS_AS(parse_graph_mode("other"), InvalidSpec);
  CHECK(graph_mode_name(GraphMode::kFignetStar) == "fignet_star");
}
