#include "figsim/groundtruth/dataset.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "figsim/error.hpp"

namespace figsim {
namespace {

using nlohmann::json;

constexpr int kVersion = 1;

TriMesh floor_quad(double half_extent) {
  TriMesh m;
  m.vertices = {{-half_extent, -half_extent, 0},
                {half_extent, -half_extent, 0},
                {half_extent, half_extent, 0},
                {-half_extent, half_extent, 0}};
  m.faces = {{0, 1, 2}, {0, 2, 3}};
  return m;
}

void write_f32(std::ostream& out, const double* values, size_t count) {
  std::vector<float> buf(count);
  for (size_t i = 0; i < count; ++i) buf[i] = static_cast<float>(values[i]);
  out.write(reinterpret_cast<const char*>(buf.data()), buf.size() * sizeof(float));
}

void read_f32(std::istream& in, double* values, size_t count, const std::string& path) {
  std::vector<float> buf(count);
  in.read(reinterpret_cast<char*>(buf.data()), buf.size() * sizeof(float));
  if (!in) throw IoError("truncated trajectory: " + path);
  for (size_t i = 0; i < count; ++i) values[i] = buf[i];
}

}  // namespace

void write_trajectory(const Trajectory& trajectory, const std::string& path) {
  json objects = json::array();
  for (const SceneObject& obj : trajectory.scene.objects) {
    json verts = json::array();
    for (const Vec3& v : obj.ref_mesh.vertices) verts.push_back({v.x, v.y, v.z});
    json faces = json::array();
    for (const auto& f : obj.ref_mesh.faces) faces.push_back({f[0], f[1], f[2]});
    objects.push_back({{"object_id", obj.object_id},
                       {"mass", obj.props.mass},
                       {"friction", obj.props.friction},
                       {"restitution", obj.props.restitution},
                       {"static", obj.props.static_flag},
                       {"kinematic", obj.props.kinematic},
                       {"vertices", std::move(verts)},
                       {"faces", std::move(faces)}});
  }
  const json header = {{"version", kVersion},
                       {"dt", trajectory.dt},
                       {"gravity", trajectory.gravity},
                       {"frames", trajectory.frames.size()},
                       {"objects", std::move(objects)}};

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << header.dump() << "\n";
  for (const FrameState& frame : trajectory.frames) {
    for (const ObjectState& s : frame.objects) {
      const double pose[7] = {s.pose.rotation.w, s.pose.rotation.x, s.pose.rotation.y,
                              s.pose.rotation.z, s.pose.translation.x, s.pose.translation.y,
                              s.pose.translation.z};
      write_f32(out, pose, 7);
      write_f32(out, &s.vertices[0].x, s.vertices.size() * 3);
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

Trajectory read_trajectory(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("missing trajectory header: " + path);
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw IoError("bad trajectory header in " + path + ": " + e.what());
  }
  if (header.value("version", -1) != kVersion) {
    throw FormatVersionMismatch("unsupported trajectory version in " + path);
  }

  Trajectory traj;
  traj.dt = header.at("dt");
  traj.gravity = header.at("gravity");
  for (const json& o : header.at("objects")) {
    SceneObject obj;
    obj.object_id = o.at("object_id");
    obj.props.mass = o.at("mass");
    obj.props.friction = o.at("friction");
    obj.props.restitution = o.at("restitution");
    obj.props.static_flag = o.at("static");
    obj.props.kinematic = o.at("kinematic");
    obj.ref_mesh.object_id = obj.object_id;
    for (const json& v : o.at("vertices")) obj.ref_mesh.vertices.push_back({v[0], v[1], v[2]});
    for (const json& f : o.at("faces")) obj.ref_mesh.faces.push_back({f[0], f[1], f[2]});
    traj.scene.objects.push_back(std::move(obj));
  }

  const size_t frames = header.at("frames");
  traj.frames.resize(frames);
  for (size_t t = 0; t < frames; ++t) {
    for (const SceneObject& obj : traj.scene.objects) {
      ObjectState s;
      double pose[7];
      read_f32(in, pose, 7, path);
      s.pose.rotation = Quat{pose[0], pose[1], pose[2], pose[3]}.normalized();
      s.pose.translation = {pose[4], pose[5], pose[6]};
      s.vertices.resize(obj.ref_mesh.vertices.size());
      read_f32(in, &s.vertices[0].x, s.vertices.size() * 3, path);
      traj.frames[t].objects.push_back(std::move(s));
    }
  }
  return traj;
}

SceneSpec random_scene(const DatasetConfig& cfg, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> count_dist(cfg.min_objects, cfg.max_objects);
  std::uniform_real_distribution<double> shape_dist(0.0, 1.0);
  std::uniform_real_distribution<double> radius_dist(0.12, 0.25);
  std::uniform_real_distribution<double> xy_dist(-0.6, 0.6);
  std::uniform_real_distribution<double> z_dist(0.4, 1.2);
  std::uniform_real_distribution<double> vxy_dist(-1.0, 1.0);
  std::uniform_real_distribution<double> vz_dist(-0.5, 0.2);

  SceneSpec spec;
  spec.dt = cfg.dt;
  spec.gravity = cfg.gravity;
  spec.steps = cfg.steps;

  SceneObject floor;
  floor.object_id = 0;
  floor.ref_mesh = floor_quad(2.0);
  floor.ref_mesh.object_id = 0;
  floor.props = default_passive_properties();
  spec.scene.objects.push_back(floor);
  spec.initial.push_back({});

  const int n = count_dist(rng);
  std::vector<Vec3> placed;
  std::vector<double> placed_radius;
  for (int i = 0; i < n; ++i) {
    SceneObject obj;
    obj.object_id = i + 1;
    const double r = radius_dist(rng);
    if (shape_dist(rng) < cfg.sphere_probability) {
      obj.ref_mesh = make_icosphere(r, cfg.sphere_subdivisions);
    } else {
      obj.ref_mesh = make_box({r, r, r});
    }
    obj.ref_mesh.object_id = obj.object_id;
    obj.props = default_active_properties();

    Vec3 pos;
    bool ok = false;
    for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
      pos = {xy_dist(rng), xy_dist(rng), z_dist(rng) + 2.0 * r};
      ok = true;
      for (size_t k = 0; k < placed.size(); ++k) {
        const double reach = 2.0 * (placed_radius[k] + r) + 0.05;
        if ((pos - placed[k]).norm() < reach) {
          ok = false;
          break;
        }
      }
    }
    if (!ok) pos.z += 2.0 * double(placed.size());  // stack stragglers vertically
    placed.push_back(pos);
    placed_radius.push_back(r);

    BodyInit init;
    init.pose.translation = pos;
    init.velocity = {vxy_dist(rng), vxy_dist(rng), vz_dist(rng)};
    spec.scene.objects.push_back(std::move(obj));
    spec.initial.push_back(init);
  }
  return spec;
}

DatasetManifest generate_dataset(const DatasetConfig& cfg, uint64_t seed) {
  namespace fs = std::filesystem;
  if (cfg.out_dir.empty()) throw InvalidSpec("generate_dataset: out_dir required");
  fs::create_directories(cfg.out_dir);

  DatasetManifest manifest;
  manifest.dt = cfg.dt;
  manifest.gravity = cfg.gravity;

  const int n_train = static_cast<int>(cfg.trajectories * cfg.train_fraction);
  const int n_valid = static_cast<int>(cfg.trajectories * cfg.valid_fraction);

  for (int i = 0; i < cfg.trajectories; ++i) {
    const SceneSpec spec = random_scene(cfg, seed * 1000003ull + uint64_t(i));
    const Trajectory traj = simulate(spec);
    char name[32];
    std::snprintf(name, sizeof(name), "traj_%05d.bin", i);
    write_trajectory(traj, (fs::path(cfg.out_dir) / name).string());
    if (i < n_train) {
      manifest.train.push_back(name);
    } else if (i < n_train + n_valid) {
      manifest.valid.push_back(name);
    } else {
      manifest.test.push_back(name);
    }
  }

  const json j = {{"dt", manifest.dt},
                  {"gravity", manifest.gravity},
                  {"splits",
                   {{"train", manifest.train}, {"valid", manifest.valid}, {"test", manifest.test}}}};
  std::ofstream out(fs::path(cfg.out_dir) / "manifest.json");
  if (!out) throw IoError("cannot write dataset manifest");
  out << j.dump(2) << "\n";
  return manifest;
}

DatasetManifest read_dataset_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("bad manifest JSON in " + path + ": " + e.what());
  }
  DatasetManifest m;
  m.dt = j.at("dt");
  m.gravity = j.at("gravity");
  for (const json& f : j.at("splits").at("train")) m.train.push_back(f);
  for (const json& f : j.at("splits").at("valid")) m.valid.push_back(f);
  for (const json& f : j.at("splits").at("test")) m.test.push_back(f);
  return m;
}

std::vector<Trajectory> load_split(const std::string& manifest_path, const std::string& split) {
  namespace fs = std::filesystem;
  const DatasetManifest m = read_dataset_manifest(manifest_path);
  const std::vector<std::string>* files = nullptr;
  if (split == "train") files = &m.train;
  else if (split == "valid") files = &m.valid;
  else if (split == "test") files = &m.test;
  else throw InvalidSpec("unknown split: " + split);

  const fs::path dir = fs::path(manifest_path).parent_path();
  std::vector<Trajectory> out;
  out.reserve(files->size());
  for (const std::string& f : *files) out.push_back(read_trajectory((dir / f).string()));
  if (out.empty()) throw DatasetEmpty("empty split: " + split);
  return out;
}

}  // namespace figsim
