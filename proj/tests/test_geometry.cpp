#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "figsim/error.hpp"
#include "figsim/geometry/kabsch.hpp"
#include "figsim/geometry/obj_io.hpp"
#include "figsim/geometry/proximity.hpp"
#include "figsim/geometry/transform.hpp"
#include "figsim/geometry/tridist.hpp"
#include "figsim/geometry/trimesh.hpp"

using namespace figsim;

namespace {

std::mt19937_64 rng(12345);

Vec3 random_unit(std::mt19937_64& g) {
  std::normal_distribution<double> n(0.0, 1.0);
  return Vec3{n(g), n(g), n(g)}.normalized();
}

RigidTransform random_transform(std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RigidTransform t;
  t.rotation = Quat::from_axis_angle(random_unit(g), std::numbers::pi * u(g));
  t.translation = {u(g), u(g), u(g)};
  return t;
}

TriMesh random_mesh(std::mt19937_64& g, int n_faces) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TriMesh m;
  for (int f = 0; f < n_faces; ++f) {
    const Vec3 base{u(g), u(g), u(g)};
    const int i = static_cast<int>(m.vertices.size());
    m.vertices.push_back(base);
    m.vertices.push_back(base + 0.2 * Vec3{u(g), u(g), u(g)});
    m.vertices.push_back(base + 0.2 * Vec3{u(g), u(g), u(g)});
    m.faces.push_back({i, i + 1, i + 2});
  }
  return m;
}

}  // namespace

TEST_CASE("apply_transform identity and translation") {
  const TriMesh tet = make_tetrahedron();
  const TriMesh same = apply_transform(tet, RigidTransform::identity());
  for (size_t i = 0; i < tet.vertices.size(); ++i) {
    CHECK((same.vertices[i] - tet.vertices[i]).norm() == doctest::Approx(0.0));
  }

  RigidTransform shift;
  shift.translation = {1, 0, 0};
  const TriMesh moved = apply_transform(tet, shift);
  for (size_t i = 0; i < tet.vertices.size(); ++i) {
    CHECK((moved.vertices[i] - tet.vertices[i] - Vec3{1, 0, 0}).norm() < 1e-15);
  }
}

TEST_CASE("apply_transform rotation composition: 90+90 = 180 about z") {
  const TriMesh tet = make_tetrahedron();
  RigidTransform r90;
  r90.rotation = Quat::from_axis_angle({0, 0, 1}, std::numbers::pi / 2.0);
  RigidTransform r180;
  r180.rotation = Quat::from_axis_angle({0, 0, 1}, std::numbers::pi);

  const TriMesh twice = apply_transform(apply_transform(tet, r90), r90);
  const TriMesh once = apply_transform(tet, r180);
  for (size_t i = 0; i < tet.vertices.size(); ++i) {
    CHECK((twice.vertices[i] - once.vertices[i]).norm() < 1e-9);
  }
}

TEST_CASE("apply_transform preserves pairwise distances") {
  const TriMesh ico = make_icosphere(0.7, 1);
  for (int trial = 0; trial < 5; ++trial) {
    const RigidTransform t = random_transform(rng);
    const TriMesh moved = apply_transform(ico, t);
    for (size_t i = 0; i < ico.vertices.size(); i += 7) {
      for (size_t j = i + 1; j < ico.vertices.size(); j += 5) {
        const double d0 = (ico.vertices[i] - ico.vertices[j]).norm();
        const double d1 = (moved.vertices[i] - moved.vertices[j]).norm();
        CHECK(std::fabs(d0 - d1) < 1e-9);
      }
    }
  }
}

TEST_CASE("rigid transform invariants") {
  for (int trial = 0; trial < 20; ++trial) {
    const RigidTransform t = random_transform(rng);
    CHECK(std::fabs(t.rotation.norm() - 1.0) < 1e-9);
    const RigidTransform id = t.compose(t.inverse());
    CHECK(std::fabs(id.rotation.angle_to(Quat::identity())) < 1e-9);
    CHECK(id.translation.norm() < 1e-9);
  }
}

TEST_CASE("rotation_error_deg basics") {
  RigidTransform a, b;
  CHECK(rotation_error_deg(a, b) == doctest::Approx(0.0));

  b.rotation = {-1, 0, 0, 0};  // -q, same rotation
  CHECK(rotation_error_deg(a, b) == doctest::Approx(0.0));

  for (const Vec3 axis : {Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0.3, -0.5, 0.8}}) {
    b.rotation = Quat::from_axis_angle(axis, std::numbers::pi / 2.0);
    CHECK(rotation_error_deg(a, b) == doctest::Approx(90.0).epsilon(1e-9));
  }
}

TEST_CASE("rotation_error_deg symmetry and triangle inequality") {
  for (int trial = 0; trial < 50; ++trial) {
    RigidTransform a = random_transform(rng);
    RigidTransform b = random_transform(rng);
    RigidTransform c = random_transform(rng);
    CHECK(rotation_error_deg(a, b) == doctest::Approx(rotation_error_deg(b, a)).epsilon(1e-12));
    CHECK(rotation_error_deg(a, c) <= rotation_error_deg(a, b) + rotation_error_deg(b, c) + 1e-9);
  }
}

TEST_CASE("kabsch identity and exact recovery") {
  const TriMesh ico = make_icosphere(1.0, 1);
  const RigidTransform id = kabsch_fit(ico.vertices, ico.vertices);
  CHECK(rotation_error_deg(id, RigidTransform::identity()) < 1e-9);
  CHECK(id.translation.norm() < 1e-12);

  RigidTransform t;
  t.rotation = Quat::from_axis_angle({0, 0, 1}, std::numbers::pi / 2.0);
  t.translation = {1, 0, 0};
  std::vector<Vec3> dst;
  for (const auto& v : ico.vertices) dst.push_back(t.apply(v));
  const RigidTransform fit = kabsch_fit(ico.vertices, dst);
  CHECK(rotation_error_deg(fit, t) < 1e-9);
  CHECK((fit.translation - t.translation).norm() < 1e-9);
}

TEST_CASE("kabsch recovers random transforms to tight tolerance") {
  const TriMesh ico = make_icosphere(0.5, 1);
  for (int trial = 0; trial < 30; ++trial) {
    const RigidTransform t = random_transform(rng);
    std::vector<Vec3> dst;
    for (const auto& v : ico.vertices) dst.push_back(t.apply(v));
    const RigidTransform fit = kabsch_fit(ico.vertices, dst);
    CHECK(rotation_error_deg(fit, t) < 1e-6);
    CHECK((fit.translation - t.translation).norm() < 1e-9);
  }
}

TEST_CASE("kabsch noise residual bounded by noise scale") {
  const TriMesh ico = make_icosphere(1.0, 1);
  const double eps = 1e-3;
  for (int seed = 0; seed < 100; ++seed) {
    std::mt19937_64 g(seed);
    std::normal_distribution<double> n(0.0, eps / std::sqrt(3.0));
    std::vector<Vec3> dst;
    double raw = 0.0;
    for (const auto& v : ico.vertices) {
      const Vec3 noise{n(g), n(g), n(g)};
      dst.push_back(v + noise);
      raw += noise.squared_norm();
    }
    const RigidTransform fit = kabsch_fit(ico.vertices, dst);
    double ss = 0.0;
    for (size_t i = 0; i < dst.size(); ++i) ss += (fit.apply(ico.vertices[i]) - dst[i]).squared_norm();
    // The identity transform is a feasible candidate, so the optimum cannot
    // do worse than the raw noise residual.
    CHECK(ss <= raw * (1.0 + 1e-9));
    CHECK(std::sqrt(ss / dst.size()) <= 1.3 * eps);
  }
}

TEST_CASE("kabsch degenerate inputs") {
  std::vector<Vec3> line = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}};
  CHECK_THROWS_AS(kabsch_fit(line, line), DegenerateFit);
  std::vector<Vec3> a = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  std::vector<Vec3> b = {{0, 0, 0}, {1, 0, 0}};
  CHECK_THROWS_AS(kabsch_fit(a, b), DegenerateFit);
  CHECK_THROWS_AS(kabsch_fit({a[0], a[1]}, {b[0], b[1]}), DegenerateFit);
}

TEST_CASE("kabsch never returns a reflection") {
  // Near-planar point sets are where the reflection branch matters.
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec3> src, dst;
    std::normal_distribution<double> n(0.0, 0.3);
    for (int i = 0; i < 8; ++i) src.push_back({u(rng), u(rng), 1e-6 * u(rng)});
    for (int i = 0; i < 8; ++i) dst.push_back({u(rng), u(rng), n(rng)});
    const RigidTransform fit = kabsch_fit(src, dst);
    // A proper rotation preserves handedness of any frame.
    const Vec3 ex = fit.rotation.rotate({1, 0, 0});
    const Vec3 ey = fit.rotation.rotate({0, 1, 0});
    const Vec3 ez = fit.rotation.rotate({0, 0, 1});
    CHECK(ex.cross(ey).dot(ez) > 0.99);
  }
}

TEST_CASE("closest_face_pairs trivial cases") {
  TriMesh a, b;
  a.object_id = 0;
  b.object_id = 1;
  a.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  a.faces = {{0, 1, 2}};
  const double radius = 0.05;
  b = a;
  for (auto& v : b.vertices) v.z += 10.0 * radius;
  CHECK(closest_face_pairs(a, b, radius).empty());

  for (auto& v : b.vertices) v.z = radius / 2.0;
  const auto pairs = closest_face_pairs(a, b, radius);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].face_a == 0);
  CHECK(pairs[0].face_b == 0);
  CHECK(pairs[0].distance == doctest::Approx(radius / 2.0));
  CHECK(pairs[0].closest_a.z == doctest::Approx(0.0));
  CHECK(pairs[0].closest_b.z == doctest::Approx(radius / 2.0));
}

TEST_CASE("closest_face_pairs matches brute force on random meshes") {
  for (int seed = 0; seed < 20; ++seed) {
    std::mt19937_64 g(seed);
    TriMesh a = random_mesh(g, 200);
    TriMesh b = random_mesh(g, 200);
    a.object_id = 0;
    b.object_id = 1;
    const double radius = 0.1;
    auto fast = closest_face_pairs(a, b, radius);
    auto brute = closest_face_pairs_brute(a, b, radius);
    REQUIRE(fast.size() == brute.size());
    for (size_t i = 0; i < fast.size(); ++i) {
      CHECK(fast[i].face_a == brute[i].face_a);
      CHECK(fast[i].face_b == brute[i].face_b);
      CHECK(fast[i].distance == doctest::Approx(brute[i].distance).epsilon(1e-12));
    }
  }
}

TEST_CASE("closest_face_pairs symmetry") {
  std::mt19937_64 g(7);
  TriMesh a = random_mesh(g, 60);
  TriMesh b = random_mesh(g, 60);
  auto ab = closest_face_pairs(a, b, 0.1);
  auto ba = closest_face_pairs(b, a, 0.1);
  REQUIRE(ab.size() == ba.size());
  for (const auto& p : ab) {
    bool found = false;
    for (const auto& q : ba) {
      if (q.face_a == p.face_b && q.face_b == p.face_a) found = true;
    }
    CHECK(found);
  }
}

TEST_CASE("degenerate faces excluded from collision pairs") {
  TriMesh a, b;
  a.vertices = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};  // zero area
  a.faces = {{0, 1, 2}};
  b.vertices = {{0, 0, 0.01}, {1, 0, 0.01}, {0, 1, 0.01}};
  b.faces = {{0, 1, 2}};
  CHECK(closest_face_pairs(a, b, 0.05).empty());
}

TEST_CASE("triangle_triangle_closest handles intersection") {
  std::array<Vec3, 3> ta{{{-1, -1, 0}, {1, -1, 0}, {0, 2, 0}}};
  std::array<Vec3, 3> tb{{{0, 0, -1}, {0.2, 0, 1}, {0, 0.2, 1}}};
  const auto cp = triangle_triangle_closest(ta, tb);
  CHECK(cp.distance == doctest::Approx(0.0));
}

TEST_CASE("validate_mesh reports") {
  const MeshReport tet = validate_mesh(make_tetrahedron());
  CHECK(tet.watertight);
  CHECK(tet.degenerate_faces == 0);
  CHECK(tet.duplicate_vertices == 0);

  TriMesh single;
  single.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  single.faces = {{0, 1, 2}};
  CHECK_FALSE(validate_mesh(single).watertight);

  const MeshReport ico = validate_mesh(make_icosphere(1.0, 2));
  CHECK(ico.watertight);
}

TEST_CASE("obj round trip") {
  const TriMesh ico = make_icosphere(0.37, 1);
  const auto path = std::filesystem::temp_directory_path() / "figsim_test_ico.obj";
  write_obj(ico, path.string());
  const TriMesh back = read_obj(path.string());
  REQUIRE(back.vertices.size() == ico.vertices.size());
  REQUIRE(back.faces.size() == ico.faces.size());
  for (size_t i = 0; i < ico.vertices.size(); ++i) {
    CHECK((back.vertices[i] - ico.vertices[i]).norm() < 1e-7);
  }
  CHECK(back.faces == ico.faces);
  std::filesystem::remove(path);
}

TEST_CASE("kabsch + apply_transform round trip on meshes") {
  const TriMesh ico = make_icosphere(0.4, 1);
  for (int trial = 0; trial < 10; ++trial) {
    const RigidTransform t = random_transform(rng);
    const TriMesh moved = apply_transform(ico, t);
    const RigidTransform fit = kabsch_fit(ico.vertices, moved.vertices);
    CHECK(rotation_error_deg(fit, t) < 1e-6);
    CHECK((fit.translation - t.translation).norm() < 1e-9);
  }
}
