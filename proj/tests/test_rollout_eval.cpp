#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <random>

#include "figsim/error.hpp"
#include "figsim/learned_sim/train.hpp"
#include "figsim/rollout_eval/benchmark.hpp"
#include "figsim/rollout_eval/rollout.hpp"

using namespace figsim;

namespace {

TriMesh floor_quad(double half_extent) {
  TriMesh m;
  m.vertices = {{-half_extent, -half_extent, 0},
                {half_extent, -half_extent, 0},
                {half_extent, half_extent, 0},
                {-half_extent, half_extent, 0}};
  m.faces = {{0, 1, 2}, {0, 2, 3}};
  return m;
}

Scene drop_scene(double radius = 0.2, int subdivisions = 0) {
  Scene scene;
  SceneObject floor;
  floor.object_id = 0;
  floor.ref_mesh = floor_quad(2.0);
  floor.ref_mesh.object_id = 0;
  floor.props = default_passive_properties();
  SceneObject ball;
  ball.object_id = 1;
  ball.ref_mesh = make_icosphere(radius, subdivisions);
  ball.ref_mesh.object_id = 1;
  ball.props = default_active_properties();
  scene.objects = {floor, ball};
  return scene;
}

FrameState frame_at(const Scene& scene, const Vec3& ball_pos) {
  std::vector<RigidTransform> poses(2);
  poses[1].translation = ball_pos;
  return make_frame(scene, poses);
}

}  // namespace

TEST_CASE("rigid projection recovers an exact rigid motion") {
  const TriMesh mesh = make_icosphere(0.3, 1);
  RigidTransform pose;
  pose.rotation = Quat::from_axis_angle({0.3, -0.5, 0.8}, 1.1);
  pose.translation = {0.4, -1.2, 2.0};
  std::vector<Vec3> predicted;
  for (const Vec3& p : mesh.vertices) predicted.push_back(pose.apply(p));

  const RigidTransform fit = rigid_project(predicted, mesh, RigidTransform::identity());
  for (size_t i = 0; i < predicted.size(); ++i) {
    CHECK((fit.apply(mesh.vertices[i]) - predicted[i]).norm() < 1e-9);
  }
  CHECK(rotation_error_deg(fit, pose) < 1e-7);
}

TEST_CASE("rigid projection damps iid noise") {
  const TriMesh mesh = make_icosphere(0.3, 2);
  RigidTransform pose;
  pose.rotation = Quat::from_axis_angle({0, 1, 0}, 0.4);
  pose.translation = {1.0, 0.5, 0.2};
  std::mt19937_64 rng(3);
  const double eps = 1e-3;
  std::normal_distribution<double> noise(0.0, eps);
  std::vector<Vec3> predicted;
  for (const Vec3& p : mesh.vertices) {
    predicted.push_back(pose.apply(p) + Vec3{noise(rng), noise(rng), noise(rng)});
  }
  const RigidTransform fit = rigid_project(predicted, mesh, pose);
  double worst = 0.0;
  for (size_t i = 0; i < predicted.size(); ++i) {
    worst = std::max(worst, (fit.apply(mesh.vertices[i]) - pose.apply(mesh.vertices[i])).norm());
  }
  CHECK(worst < 5.0 * eps);
}

TEST_CASE("rigid projection never returns a reflection") {
  const TriMesh mesh = make_icosphere(0.3, 1);
  std::vector<Vec3> mirrored;
  for (const Vec3& p : mesh.vertices) mirrored.push_back({p.x, p.y, -p.z});
  const RigidTransform fit = rigid_project(mirrored, mesh, RigidTransform::identity());
  // a proper rotation: |q| = 1 and the mapped frame stays right-handed
  const Quat q = fit.rotation;
  CHECK(std::fabs(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z - 1.0) < 1e-9);
  const Vec3 x = q.rotate({1, 0, 0});
  const Vec3 y = q.rotate({0, 1, 0});
  const Vec3 z = q.rotate({0, 0, 1});
  CHECK(x.cross(y).dot(z) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("evaluating a rollout against itself gives zero error") {
  SceneSpec spec;
  spec.scene = drop_scene();
  spec.initial.resize(2);
  spec.initial[1].pose.translation = {0, 0, 0.8};
  spec.initial[1].velocity = {0.5, 0.0, 0.0};
  spec.initial[1].angular_velocity = {0.0, 2.0, 0.0};
  spec.steps = 60;
  const Trajectory truth = simulate(spec);

  RolloutResult oracle;  // wrap the ground truth directly
  oracle.horizon = 50;
  for (int k = 0; k <= 50; ++k) oracle.frames.push_back(truth.frames[1 + k]);

  const EvalReport report = evaluate(oracle, truth, 50);
  CHECK(report.translation_rmse == 0.0);
  CHECK(report.rotation_rmse_deg < 1e-6);
  REQUIRE(report.translation_curve.size() == 50);
  for (const double x : report.translation_curve) CHECK(x == 0.0);
}

TEST_CASE("evaluate reports a constant pose offset exactly") {
  SceneSpec spec;
  spec.scene = drop_scene();
  spec.initial.resize(2);
  spec.initial[1].pose.translation = {0, 0, 5.0};
  spec.steps = 12;
  const Trajectory truth = simulate(spec);

  RolloutResult shifted;
  shifted.horizon = 10;
  for (int k = 0; k <= 10; ++k) {
    FrameState f = truth.frames[1 + k];
    f.objects[1].pose.translation += Vec3{0.1, 0.0, 0.0};
    shifted.frames.push_back(f);
  }
  const EvalReport report = evaluate(shifted, truth, 10);
  CHECK(report.translation_rmse == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(report.rotation_rmse_deg < 1e-6);

  CHECK_THROWS_AS(evaluate(shifted, truth, 50), LengthMismatch);
}

TEST_CASE("zero-decoder rollout extrapolates at constant velocity") {
  const Scene scene = drop_scene();
  const Vec3 v{0.02, -0.01, 0.005};  // per-step displacement
  const FrameState prev = frame_at(scene, {0, 0, 1.0});
  const FrameState curr = frame_at(scene, Vec3{0, 0, 1.0} + v);

  ModelConfig mc;
  mc.hidden = 8;
  mc.message_passing_steps = 1;
  const ModelParams params = init_model(mc, 2);  // zero decoder output
  const NormalizerSet norms = identity_normalizers();

  const RolloutResult learned = rollout(params, norms, scene, prev, curr, 20, 0.1);
  const RolloutResult baseline = constant_velocity_rollout(scene, prev, curr, 20);
  REQUIRE(learned.frames.size() == 21);
  CHECK_FALSE(learned.diverged);

  for (int k = 0; k <= 20; ++k) {
    const Vec3 expected = Vec3{0, 0, 1.0} + double(k + 1) * v;
    CHECK((learned.frames[k].objects[1].pose.translation - expected).norm() < 1e-9);
    CHECK((baseline.frames[k].objects[1].pose.translation - expected).norm() < 1e-9);
    // the floor never moves
    CHECK(learned.frames[k].objects[0].pose.translation.norm() == 0.0);
  }
}

TEST_CASE("rollout states stay rigid") {
  const Scene scene = drop_scene(0.2, 1);
  const FrameState prev = frame_at(scene, {0, 0, 0.9});
  const FrameState curr = frame_at(scene, {0.01, 0.0, 0.89});

  ModelConfig mc;
  mc.hidden = 8;
  mc.message_passing_steps = 2;
  ModelParams params = init_model(mc, 9);
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  for (Tensor& t : params.tensors) {
    for (double& x : t.v) x += u(rng);
  }

  const RolloutResult result = rollout(params, identity_normalizers(), scene, prev, curr, 15, 0.1);
  REQUIRE_FALSE(result.diverged);
  const auto& ref = scene.objects[1].ref_mesh.vertices;
  const double d = (ref[0] - ref[5]).norm();
  for (const FrameState& f : result.frames) {
    const auto& verts = f.objects[1].vertices;
    CHECK(std::fabs((verts[0] - verts[5]).norm() - d) < 1e-6);
  }
}

TEST_CASE("a non-finite prediction aborts with the diverged flag") {
  const Scene scene = drop_scene();
  const FrameState prev = frame_at(scene, {0, 0, 1.0});
  const FrameState curr = frame_at(scene, {0, 0, 0.99});

  ModelConfig mc;
  mc.hidden = 8;
  mc.message_passing_steps = 1;
  ModelParams params = init_model(mc, 4);
  for (Tensor& t : params.tensors) {
    for (double& x : t.v) x = 1e200;  // overflow the forward pass
  }
  const RolloutResult result = rollout(params, identity_normalizers(), scene, prev, curr, 10, 0.1);
  CHECK(result.diverged);
  CHECK(result.frames.size() >= 1);
  CHECK(result.frames.size() < 11);
}

TEST_CASE("benchmark compares the two graph modes") {
  DatasetConfig dcfg;
  dcfg.sphere_subdivisions = 1;
  dcfg.min_objects = 2;
  dcfg.max_objects = 3;
  dcfg.steps = 25;
  std::vector<Trajectory> data;
  for (int i = 0; i < 3; ++i) data.push_back(simulate(random_scene(dcfg, 500 + i)));

  BenchmarkConfig cfg;
  cfg.hidden = 32;
  cfg.message_passing_steps = 2;
  cfg.sample_transitions = 8;
  cfg.timing_runs = 5;
  const BenchmarkReport report = benchmark_modes(data, cfg);

  CHECK(report.structural_identity);
  CHECK(report.fignet_star.mean_stats.node_node_edges == 0);
  CHECK(report.fignet.mean_stats.node_node_edges > 0);
  CHECK(report.fignet_star.mean_stats.total_edges < report.fignet.mean_stats.total_edges);
  CHECK(report.fignet_star.mean_stats.feature_memory_bytes <
        report.fignet.mean_stats.feature_memory_bytes);
  CHECK(report.fignet.median_ms > 0.0);
  CHECK(report.fignet_star.median_ms > 0.0);

  // identical statistics on a second run
  const BenchmarkReport again = benchmark_modes(data, cfg);
  CHECK(again.fignet.mean_stats.total_edges == report.fignet.mean_stats.total_edges);
  CHECK(again.fignet_star.mean_stats.total_edges == report.fignet_star.mean_stats.total_edges);

  const auto path = std::filesystem::temp_directory_path() / "figsim_bench.json";
  write_benchmark_json(report, path.string());
  CHECK(std::filesystem::file_size(path) > 0);
  std::filesystem::remove(path);

  const std::string table = benchmark_table(report);
  CHECK(table.find("Memory (MiB)") != std::string::npos);
  CHECK(table.find("Runtime (ms)") != std::string::npos);
  CHECK(table.find("Trans. Err.") != std::string::npos);
  CHECK(table.find("Rot. Err.") != std::string::npos);
  CHECK(table.find("Edge Count") != std::string::npos);
  CHECK(table.find("fignet_star") != std::string::npos);
}

TEST_CASE("trained one-ball model beats the constant-velocity baseline") {
  // single falling-and-bouncing ball; training and evaluation share the scene
  SceneSpec spec;
  spec.scene = drop_scene(0.2, 0);
  spec.scene.objects[1].props.restitution = 0.5;
  spec.initial.resize(2);
  spec.initial[1].pose.translation = {0, 0, 0.9};
  spec.initial[1].velocity = {0.6, 0.0, 0.0};
  spec.steps = 80;
  const Trajectory truth = simulate(spec);

  TrainConfig cfg;
  cfg.model.mode = GraphMode::kFignetStar;
  cfg.model.hidden = 32;
  cfg.model.message_passing_steps = 2;
  cfg.steps = 1200;
  cfg.batch = 4;
  cfg.lr_start = 3e-3;
  cfg.lr_end = 5e-4;
  cfg.noise_std = 1e-4;
  cfg.normalizer_samples = 80;
  const TrainResult trained = train({truth}, cfg, 23);

  const int horizon = 50;
  const RolloutResult learned = rollout(trained.params, trained.norms, truth.scene,
                                        truth.frames[0], truth.frames[1], horizon, 0.1);
  const RolloutResult baseline =
      constant_velocity_rollout(truth.scene, truth.frames[0], truth.frames[1], horizon);
  REQUIRE_FALSE(learned.diverged);

  const EvalReport learned_report = evaluate(learned, truth, horizon);
  const EvalReport baseline_report = evaluate(baseline, truth, horizon);
  MESSAGE("learned ", learned_report.translation_rmse, " baseline ",
          baseline_report.translation_rmse);
  CHECK(learned_report.translation_rmse < 0.5 * baseline_report.translation_rmse);
}
