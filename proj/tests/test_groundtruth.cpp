#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "figsim/error.hpp"
#include "figsim/groundtruth/dataset.hpp"

using namespace figsim;

namespace {

SceneSpec sphere_drop(double bottom_height, double restitution, double friction,
                      int steps = 300) {
  SceneSpec spec;
  spec.steps = steps;
  SceneObject ball;
  ball.object_id = 1;
  ball.ref_mesh = make_icosphere(0.5, 2);
  ball.ref_mesh.object_id = 1;
  ball.props = default_active_properties();
  ball.props.restitution = restitution;
  ball.props.friction = friction;
  spec.scene.objects = {ball};
  BodyInit init;
  init.pose.translation = {0, 0, bottom_height + 0.5};
  spec.initial = {init};
  return spec;
}

double bottom_z(const ObjectState& s) {
  double z = std::numeric_limits<double>::max();
  for (const Vec3& p : s.vertices) z = std::min(z, p.z);
  return z;
}

Vec3 com_of(const ObjectState& s) {
  Vec3 c;
  for (const Vec3& p : s.vertices) c += p;
  return (1.0 / double(s.vertices.size())) * c;
}

}  // namespace

TEST_CASE("free fall matches analytic kinematics") {
  SceneSpec spec = sphere_drop(5.0, 0.5, 0.5, 60);  // stays airborne
  spec.gravity = 9.8;
  const Trajectory traj = simulate(spec);
  const double z0 = com_of(traj.frames[0].objects[0]).z;
  for (int t = 1; t <= 60; ++t) {
    const double time = t * spec.dt;
    const double analytic = z0 - 0.5 * spec.gravity * time * time;
    const double simulated = com_of(traj.frames[t].objects[0]).z;
    // semi-implicit Euler lags by up to 1/2 g dt per step
    CHECK(std::fabs(simulated - analytic) <= 0.5 * spec.gravity * spec.dt * time + 1e-9);
  }
}

TEST_CASE("bounce apex follows e^2 h") {
  const double h = 1.0, e = 0.5;
  SceneSpec spec = sphere_drop(h, e, 0.5, 400);
  spec.gravity = 9.8;
  const Trajectory traj = simulate(spec);

  // find first impact, then the apex before the second impact
  int impact = -1;
  for (size_t t = 0; t < traj.contact.size(); ++t) {
    if (traj.contact[t]) {
      impact = static_cast<int>(t);
      break;
    }
  }
  REQUIRE(impact > 0);
  double apex = 0.0;
  for (size_t t = impact + 1; t < traj.contact.size(); ++t) {
    if (traj.contact[t]) break;
    apex = std::max(apex, bottom_z(traj.frames[t + 1].objects[0]));
  }
  const double v_impact = std::sqrt(2.0 * spec.gravity * h);
  CHECK(std::fabs(apex - e * e * h) <= 2.0 * spec.dt * v_impact);
}

TEST_CASE("resting sphere stays put") {
  SceneSpec spec = sphere_drop(0.0, 0.5, 0.5, 100);
  const Trajectory traj = simulate(spec);
  const Vec3 start = com_of(traj.frames[0].objects[0]);
  for (int t = 1; t <= 100; ++t) {
    CHECK((com_of(traj.frames[t].objects[0]) - start).norm() < 1e-6);
  }
}

TEST_CASE("energy never increases") {
  for (const double e : {0.0, 0.3, 0.8}) {
    for (const double mu : {0.0, 0.5}) {
      SceneSpec spec = sphere_drop(0.7, e, mu, 300);
      spec.initial[0].velocity = {0.8, -0.4, 0.0};
      const Trajectory traj = simulate(spec);
      const double e0 = mechanical_energy(traj, 0);
      double prev = e0;
      for (size_t t = 1; t < traj.frames.size(); ++t) {
        const double now = mechanical_energy(traj, static_cast<int>(t));
        CHECK(now <= prev + 1e-6 * e0);
        prev = now;
      }
    }
  }
}

TEST_CASE("horizontal momentum conserved without friction") {
  SceneSpec spec = sphere_drop(0.5, 0.6, 0.0, 300);
  spec.initial[0].velocity = {1.2, -0.7, 0.0};
  const Trajectory traj = simulate(spec);
  for (size_t t = 0; t < traj.frames.size(); ++t) {
    const Vec3 v = traj.kinematics[t][0].velocity;
    CHECK(v.x == doctest::Approx(1.2).epsilon(1e-9));
    CHECK(v.y == doctest::Approx(-0.7).epsilon(1e-9));
  }
}

TEST_CASE("trajectories are rigid") {
  SceneSpec spec = sphere_drop(0.8, 0.5, 0.5, 200);
  spec.initial[0].velocity = {1.0, 0.3, 0.0};
  spec.initial[0].angular_velocity = {0.5, -0.2, 1.0};
  const Trajectory traj = simulate(spec);
  const auto& ref = traj.frames[0].objects[0].vertices;
  const double d01 = (ref[0] - ref[1]).norm();
  const double d07 = (ref[0] - ref[7]).norm();
  for (size_t t = 1; t < traj.frames.size(); ++t) {
    const auto& v = traj.frames[t].objects[0].vertices;
    CHECK(std::fabs((v[0] - v[1]).norm() - d01) < 1e-9);
    CHECK(std::fabs((v[0] - v[7]).norm() - d07) < 1e-9);
  }
}

TEST_CASE("sphere-sphere collision conserves momentum") {
  SceneSpec spec;
  spec.steps = 120;
  spec.gravity = 0.0;  // isolate the pair interaction
  for (int i = 0; i < 2; ++i) {
    SceneObject ball;
    ball.object_id = i + 1;
    ball.ref_mesh = make_icosphere(0.2, 2);
    ball.ref_mesh.object_id = ball.object_id;
    ball.props = default_active_properties();
    ball.props.restitution = 0.8;
    spec.scene.objects.push_back(ball);
    BodyInit init;
    init.pose.translation = {i == 0 ? -0.5 : 0.5, 0, 1.0};
    init.velocity = {i == 0 ? 1.0 : -1.0, 0, 0};
    spec.initial.push_back(init);
  }
  const Trajectory traj = simulate(spec);
  bool collided = false;
  for (const auto c : traj.contact) collided |= (c != 0);
  CHECK(collided);
  for (size_t t = 0; t < traj.frames.size(); ++t) {
    const Vec3 p = traj.kinematics[t][0].velocity + traj.kinematics[t][1].velocity;
    CHECK(p.norm() < 1e-9);  // total momentum stays zero by symmetry
  }
  // they bounce apart
  const Vec3 v_end = traj.kinematics.back()[0].velocity;
  CHECK(v_end.x < 0.0);
}

TEST_CASE("box lands flat and stops penetrating") {
  SceneSpec spec;
  spec.steps = 300;
  SceneObject box;
  box.object_id = 1;
  box.ref_mesh = make_box({0.2, 0.2, 0.2});
  box.ref_mesh.object_id = 1;
  box.props = default_active_properties();
  box.props.restitution = 0.2;
  spec.scene.objects = {box};
  BodyInit init;
  init.pose.translation = {0, 0, 0.8};
  spec.initial = {init};
  const Trajectory traj = simulate(spec);
  for (const FrameState& f : traj.frames) {
    CHECK(bottom_z(f.objects[0]) > -1e-6);
  }
  // settled near the floor by the end
  CHECK(bottom_z(traj.frames.back().objects[0]) < 0.02);
}

TEST_CASE("initial penetration rejected") {
  SceneSpec spec = sphere_drop(-0.2, 0.5, 0.5, 10);
  CHECK_THROWS_AS(simulate(spec), InvalidSpec);
}

TEST_CASE("trajectory file round trip") {
  SceneSpec spec = sphere_drop(0.6, 0.4, 0.5, 50);
  spec.initial[0].velocity = {0.5, 0.1, 0};
  const Trajectory traj = simulate(spec);
  const auto path = std::filesystem::temp_directory_path() / "figsim_traj.bin";
  write_trajectory(traj, path.string());
  const Trajectory back = read_trajectory(path.string());
  CHECK(back.dt == traj.dt);
  CHECK(back.gravity == traj.gravity);
  REQUIRE(back.frames.size() == traj.frames.size());
  REQUIRE(back.scene.objects.size() == traj.scene.objects.size());
  CHECK(back.scene.objects[0].props.restitution == 0.4);
  for (size_t t = 0; t < traj.frames.size(); ++t) {
    const auto& a = traj.frames[t].objects[0];
    const auto& b = back.frames[t].objects[0];
    for (size_t v = 0; v < a.vertices.size(); ++v) {
      CHECK((a.vertices[v] - b.vertices[v]).norm() < 1e-5);  // float32 storage
    }
    CHECK((a.pose.translation - b.pose.translation).norm() < 1e-5);
  }
  std::filesystem::remove(path);
}

TEST_CASE("dataset generation is deterministic and clean") {
  namespace fs = std::filesystem;
  const auto dir_a = fs::temp_directory_path() / "figsim_ds_a";
  const auto dir_b = fs::temp_directory_path() / "figsim_ds_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);

  DatasetConfig cfg;
  cfg.trajectories = 6;
  cfg.steps = 40;
  cfg.min_objects = 2;
  cfg.max_objects = 3;
  cfg.out_dir = dir_a.string();
  const DatasetManifest ma = generate_dataset(cfg, 7);
  cfg.out_dir = dir_b.string();
  generate_dataset(cfg, 7);

  CHECK(ma.train.size() == 4);
  CHECK(ma.valid.size() == 0);
  CHECK(ma.test.size() == 2);

  for (const auto& entry : fs::directory_iterator(dir_a)) {
    const auto other = dir_b / entry.path().filename();
    std::ifstream fa(entry.path(), std::ios::binary);
    std::ifstream fb(other, std::ios::binary);
    REQUIRE(fb.good());
    const std::string ca((std::istreambuf_iterator<char>(fa)), {});
    const std::string cb((std::istreambuf_iterator<char>(fb)), {});
    CHECK(ca == cb);
  }

  // audit: no NaN, no deep floor penetration
  const auto trajs = load_split((dir_a / "manifest.json").string(), "train");
  for (const Trajectory& t : trajs) {
    for (const FrameState& f : t.frames) {
      for (const ObjectState& o : f.objects) {
        for (const Vec3& p : o.vertices) {
          CHECK(p.is_finite());
          CHECK(p.z > -1e-6);
        }
      }
    }
  }
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}
