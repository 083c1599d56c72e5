#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "figsim/error.hpp"
#include "figsim/fields/grid_io.hpp"
#include "figsim/fields/render.hpp"
#include "figsim/geometry/obj_io.hpp"
#include "figsim/groundtruth/dataset.hpp"
#include "figsim/learned_sim/checkpoint.hpp"
#include "figsim/learned_sim/train.hpp"
#include "figsim/perception/perception.hpp"
#include "figsim/rollout_eval/benchmark.hpp"
#include "figsim/rollout_eval/rollout.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace figsim;

namespace {

enum class LogLevel { kDebug = 0, kInfo, kWarn, kError };
LogLevel g_log_level = LogLevel::kInfo;

void log_at(LogLevel level, const char* tag, const std::string& msg) {
  if (level < g_log_level) return;
  std::fprintf(stderr, "[%s] %s\n", tag, msg.c_str());
}
void log_debug(const std::string& m) { log_at(LogLevel::kDebug, "debug", m); }
void log_info(const std::string& m) { log_at(LogLevel::kInfo, "info", m); }
void log_warn(const std::string& m) { log_at(LogLevel::kWarn, "warn", m); }

LogLevel parse_log_level(const std::string& s) {
  if (s == "debug") return LogLevel::kDebug;
  if (s == "info") return LogLevel::kInfo;
  if (s == "warn") return LogLevel::kWarn;
  if (s == "error") return LogLevel::kError;
  throw CLI::ValidationError("--log-level", "expected debug|info|warn|error");
}

std::string default_out_dir() {
  const char* env = std::getenv("FIGSIM_OUT_DIR");
  return env ? env : ".";
}

void require_file(const std::string& path) {
  if (!fs::exists(path)) throw IoError("input file does not exist: " + path);
}

//! Fill every option the command line left untouched from a JSON config
//! file; explicit flags always win.
void apply_config(CLI::App* sub, const std::string& config_path) {
  if (config_path.empty()) return;
  require_file(config_path);
  std::ifstream in(config_path);
  json cfg;
  try {
    in >> cfg;
  } catch (const json::exception& e) {
    throw IoError("bad config JSON in " + config_path + ": " + e.what());
  }
  for (CLI::Option* opt : sub->get_options()) {
    if (opt->count() > 0 || opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (!cfg.contains(name)) continue;
    const json& v = cfg.at(name);
    opt->add_result(v.is_string() ? v.get<std::string>() : v.dump());
    opt->run_callback();
  }
}

json transform_json(const RigidTransform& t) {
  return {{"rotation", {t.rotation.w, t.rotation.x, t.rotation.y, t.rotation.z}},
          {"translation", {t.translation.x, t.translation.y, t.translation.z}}};
}

RigidTransform transform_from_json(const json& j) {
  RigidTransform t;
  const auto& r = j.at("rotation");
  t.rotation = Quat{r[0], r[1], r[2], r[3]}.normalized();
  const auto& p = j.at("translation");
  t.translation = {p[0], p[1], p[2]};
  return t;
}

//! Rollout artifact consumed by render-edit: the active object's initial
//! world-space bounds plus one transform per step relative to step 0.
void write_transforms_json(const Aabb& volume, const std::vector<RigidTransform>& transforms,
                           const std::string& path) {
  json steps = json::array();
  for (const RigidTransform& t : transforms) steps.push_back(transform_json(t));
  const json j = {{"volume",
                   {{"min", {volume.min.x, volume.min.y, volume.min.z}},
                    {"max", {volume.max.x, volume.max.y, volume.max.z}}}},
                  {"transforms", std::move(steps)}};
  std::ofstream out(path);
  if (!out) throw IoError("cannot write transforms: " + path);
  out << j.dump(2) << "\n";
}

void read_transforms_json(const std::string& path, Aabb& volume,
                          std::vector<RigidTransform>& transforms) {
  require_file(path);
  std::ifstream in(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("bad transforms JSON in " + path + ": " + e.what());
  }
  const auto& v = j.at("volume");
  volume.min = {v.at("min")[0], v.at("min")[1], v.at("min")[2]};
  volume.max = {v.at("max")[0], v.at("max")[1], v.at("max")[2]};
  transforms.clear();
  for (const json& t : j.at("transforms")) transforms.push_back(transform_from_json(t));
}

std::string resolve_near(const std::string& anchor_file, const std::string& path) {
  const fs::path p(path);
  if (p.is_absolute()) return path;
  return (fs::path(anchor_file).parent_path() / p).string();
}

MaskSet load_views(const SceneManifest& manifest, const std::string& manifest_path) {
  MaskSet views;
  for (const SceneManifest::View& v : manifest.views) {
    MaskView view;
    const std::string mask = resolve_near(manifest_path, v.mask_path);
    const std::string depth = resolve_near(manifest_path, v.depth_path);
    const std::string camera = resolve_near(manifest_path, v.camera_path);
    require_file(mask);
    require_file(depth);
    require_file(camera);
    view.mask = read_mask_pgm(mask);
    view.depth = read_depth_pgm(depth);
    view.camera = read_camera_json(camera);
    views.push_back(std::move(view));
  }
  return views;
}

SceneWithHistory perceive_from_manifest(const std::string& manifest_path) {
  require_file(manifest_path);
  const SceneManifest manifest = read_scene_manifest(manifest_path);
  const std::string field_path = resolve_near(manifest_path, manifest.field_path);
  require_file(field_path);
  const auto field = read_grid(field_path);
  const MaskSet views = load_views(manifest, manifest_path);
  return perceive_scene(*field, views, manifest.extraction, manifest.active_props,
                        manifest.passive_props, manifest.history_offset);
}

int active_object_index(const Scene& scene) {
  for (size_t i = 0; i < scene.objects.size(); ++i) {
    if (!scene.objects[i].props.static_flag && scene.objects[i].props.mass > 0.0) {
      return static_cast<int>(i);
    }
  }
  throw InvalidSpec("scene has no dynamic object");
}

Aabb object_bounds(const ObjectState& state) {
  Aabb box;
  for (const Vec3& p : state.vertices) box.extend(p);
  return box;
}

// ---------------------------------------------------------------------------

void setup_gen_data(CLI::App& app) {
  auto* sub = app.add_subcommand("gen-data", "Simulate random toss scenes into a dataset");
  auto opts = std::make_shared<DatasetConfig>();
  auto seed = std::make_shared<uint64_t>(0);
  auto config = std::make_shared<std::string>();
  opts->out_dir = default_out_dir();
  sub->add_option("--config", *config, "JSON config file; explicit flags win");
  sub->add_option("--out", opts->out_dir, "output directory");
  sub->add_option("--trajectories", opts->trajectories, "number of trajectories");
  sub->add_option("--steps", opts->steps, "simulation steps per trajectory");
  sub->add_option("--min-objects", opts->min_objects, "min dynamic objects per scene");
  sub->add_option("--max-objects", opts->max_objects, "max dynamic objects per scene");
  sub->add_option("--dt", opts->dt, "timestep in seconds");
  sub->add_option("--gravity", opts->gravity, "gravity in m/s^2");
  sub->add_option("--sphere-subdivisions", opts->sphere_subdivisions,
                  "icosphere subdivision level");
  sub->add_option("--sphere-probability", opts->sphere_probability,
                  "probability of a sphere vs a box");
  sub->add_option("--train-fraction", opts->train_fraction, "train split fraction");
  sub->add_option("--valid-fraction", opts->valid_fraction, "validation split fraction");
  sub->add_option("--seed", *seed, "RNG seed");
  sub->callback([sub, opts, seed, config]() {
    apply_config(sub, *config);
    const DatasetManifest m = generate_dataset(*opts, *seed);
    log_info("wrote " + std::to_string(opts->trajectories) + " trajectories to " +
             opts->out_dir + " (train " + std::to_string(m.train.size()) + ", valid " +
             std::to_string(m.valid.size()) + ", test " + std::to_string(m.test.size()) + ")");
  });
}

void setup_train(CLI::App& app) {
  auto* sub = app.add_subcommand("train", "Train a one-step dynamics model");
  auto cfg = std::make_shared<TrainConfig>();
  auto data = std::make_shared<std::string>();
  auto split = std::make_shared<std::string>("train");
  auto mode = std::make_shared<std::string>("fignet_star");
  auto seed = std::make_shared<uint64_t>(0);
  auto config = std::make_shared<std::string>();
  sub->add_option("--config", *config, "JSON config file; explicit flags win");
  sub->add_option("--data", *data, "dataset manifest.json")->required();
  sub->add_option("--split", *split, "dataset split to train on");
  sub->add_option("--mode", *mode, "graph mode: fignet or fignet_star");
  sub->add_option("--hidden", cfg->model.hidden, "hidden width");
  sub->add_option("--message-passing-steps", cfg->model.message_passing_steps,
                  "message passing rounds");
  sub->add_option("--steps", cfg->steps, "optimizer steps");
  sub->add_option("--batch", cfg->batch, "transitions per step");
  sub->add_option("--lr-start", cfg->lr_start, "initial learning rate");
  sub->add_option("--lr-end", cfg->lr_end, "final learning rate");
  sub->add_option("--noise", cfg->noise_std, "input position noise stddev");
  sub->add_option("--collision-radius", cfg->collision_radius, "face-face search radius");
  sub->add_option("--normalizer-samples", cfg->normalizer_samples,
                  "transitions used to fit input statistics");
  sub->add_option("--checkpoint", cfg->checkpoint_path, "checkpoint output path")->required();
  sub->add_option("--checkpoint-every", cfg->checkpoint_every, "periodic save interval");
  sub->add_option("--loss-curve", cfg->loss_curve_path, "per-step loss CSV path");
  sub->add_option("--seed", *seed, "RNG seed");
  sub->callback([sub, cfg, data, split, mode, seed, config]() {
    apply_config(sub, *config);
    require_file(*data);
    cfg->model.mode = parse_graph_mode(*mode);
    const std::vector<Trajectory> trajectories = load_split(*data, *split);
    log_info("training " + *mode + " on " + std::to_string(trajectories.size()) +
             " trajectories, " + std::to_string(cfg->steps) + " steps");
    const TrainResult result = train(trajectories, *cfg, *seed);
    char buf[160];
    std::snprintf(buf, sizeof(buf), "final loss %.6e, %.1f ms/step, checkpoint %s",
                  result.losses.back(), result.ms_per_step, cfg->checkpoint_path.c_str());
    log_info(buf);
  });
}

void setup_eval(CLI::App& app) {
  auto* sub = app.add_subcommand("eval", "Rollout a checkpoint against ground truth");
  auto data = std::make_shared<std::string>();
  auto ckpt = std::make_shared<std::string>();
  auto split = std::make_shared<std::string>("test");
  auto report_path = std::make_shared<std::string>();
  auto horizon = std::make_shared<int>(50);
  auto radius = std::make_shared<double>(0.1);
  auto max_traj = std::make_shared<int>(0);
  auto config = std::make_shared<std::string>();
  sub->add_option("--config", *config, "JSON config file; explicit flags win");
  sub->add_option("--data", *data, "dataset manifest.json")->required();
  sub->add_option("--checkpoint", *ckpt, "trained checkpoint")->required();
  sub->add_option("--split", *split, "dataset split to evaluate");
  sub->add_option("--horizon", *horizon, "rollout steps before measuring RMSE");
  sub->add_option("--collision-radius", *radius, "face-face search radius");
  sub->add_option("--max-trajectories", *max_traj, "cap on evaluated trajectories (0 = all)");
  sub->add_option("--report", *report_path, "JSON report output path");
  sub->callback([sub, data, ckpt, split, report_path, horizon, radius, max_traj, config]() {
    apply_config(sub, *config);
    require_file(*data);
    require_file(*ckpt);
    const Checkpoint checkpoint = load_checkpoint(*ckpt);
    std::vector<Trajectory> trajectories = load_split(*data, *split);
    if (*max_traj > 0 && static_cast<int>(trajectories.size()) > *max_traj) {
      trajectories.resize(*max_traj);
    }

    json per_traj = json::array();
    double trans_sum = 0, trans_sq = 0, rot_sum = 0, base_sum = 0;
    int evaluated = 0, diverged = 0;
    for (const Trajectory& truth : trajectories) {
      if (static_cast<int>(truth.frames.size()) < *horizon + 2) {
        log_warn("skipping short trajectory (" + std::to_string(truth.frames.size()) +
                 " frames)");
        continue;
      }
      const RolloutResult learned = rollout(checkpoint.params, checkpoint.norms, truth.scene,
                                            truth.frames[0], truth.frames[1], *horizon, *radius);
      if (learned.diverged) {
        ++diverged;
        continue;
      }
      const RolloutResult baseline =
          constant_velocity_rollout(truth.scene, truth.frames[0], truth.frames[1], *horizon);
      const EvalReport rep = evaluate(learned, truth, *horizon);
      const EvalReport base = evaluate(baseline, truth, *horizon);
      trans_sum += rep.translation_rmse;
      trans_sq += rep.translation_rmse * rep.translation_rmse;
      rot_sum += rep.rotation_rmse_deg;
      base_sum += base.translation_rmse;
      ++evaluated;
      per_traj.push_back({{"translation_rmse", rep.translation_rmse},
                          {"rotation_rmse_deg", rep.rotation_rmse_deg},
                          {"baseline_translation_rmse", base.translation_rmse}});
    }
    if (evaluated == 0) throw DatasetEmpty("no trajectory long enough to evaluate");

    const double trans_mean = trans_sum / evaluated;
    const double trans_std =
        std::sqrt(std::max(0.0, trans_sq / evaluated - trans_mean * trans_mean));
    const double rot_mean = rot_sum / evaluated;
    const double base_mean = base_sum / evaluated;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "horizon %d: translation RMSE %.4f +- %.4f m, rotation RMSE %.2f deg, "
                  "baseline %.4f m, %d trajectories (%d diverged)",
                  *horizon, trans_mean, trans_std, rot_mean, base_mean, evaluated, diverged);
    std::printf("%s\n", buf);

    if (!report_path->empty()) {
      const json j = {{"mode", graph_mode_name(checkpoint.params.config.mode)},
                      {"horizon", *horizon},
                      {"trajectories", evaluated},
                      {"diverged", diverged},
                      {"translation_rmse_mean", trans_mean},
                      {"translation_rmse_std", trans_std},
                      {"rotation_rmse_deg_mean", rot_mean},
                      {"baseline_translation_rmse_mean", base_mean},
                      {"per_trajectory", per_traj}};
      std::ofstream out(*report_path);
      if (!out) throw IoError("cannot write report: " + *report_path);
      out << j.dump(2) << "\n";
    }
  });
}

void setup_bench_graph(CLI::App& app) {
  auto* sub = app.add_subcommand("bench-graph", "Compare the two graph modes on a dataset");
  auto data = std::make_shared<std::string>();
  auto cfg = std::make_shared<BenchmarkConfig>();
  auto out = std::make_shared<std::string>();
  auto config = std::make_shared<std::string>();
  sub->add_option("--config", *config, "JSON config file; explicit flags win");
  sub->add_option("--data", *data, "dataset manifest.json")->required();
  sub->add_option("--hidden", cfg->hidden, "hidden width for timing");
  sub->add_option("--message-passing-steps", cfg->message_passing_steps,
                  "message passing rounds for timing");
  sub->add_option("--samples", cfg->sample_transitions, "transitions sampled for statistics");
  sub->add_option("--runs", cfg->timing_runs, "timed forward passes per mode");
  sub->add_option("--collision-radius", cfg->collision_radius, "face-face search radius");
  sub->add_option("--out", *out, "JSON report output path");
  sub->add_option("--seed", cfg->seed, "RNG seed");
  sub->callback([sub, data, cfg, out, config]() {
    apply_config(sub, *config);
    require_file(*data);
    const std::vector<Trajectory> trajectories = load_split(*data, "train");
    const BenchmarkReport report = benchmark_modes(trajectories, *cfg);
    std::printf("%s", benchmark_table(report).c_str());
    if (!report.structural_identity) {
      log_warn("structural identity check FAILED: star graph != full graph minus node-node");
    }
    if (!out->empty()) write_benchmark_json(report, *out);
  });
}

void setup_extract_mesh(CLI::App& app) {
  auto* sub = app.add_subcommand("extract-mesh",
                                 "Masks + cameras + density field -> object meshes");
  auto manifest_path = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto passive_out = std::make_shared<std::string>();
  auto faces = std::make_shared<int>(0);
  auto resolution = std::make_shared<int>(0);
  auto threshold = std::make_shared<double>(0.0);
  auto config = std::make_shared<std::string>();
  sub->add_option("--config", *config, "JSON config file; explicit flags win");
  sub->add_option("--manifest", *manifest_path, "scene manifest JSON")->required();
  sub->add_option("--out", *out, "active mesh OBJ output")->required();
  sub->add_option("--passive-out", *passive_out, "passive mesh OBJ output");
  sub->add_option("--faces", *faces, "decimation face budget override");
  sub->add_option("--resolution", *resolution, "marching-cubes resolution override");
  sub->add_option("--threshold", *threshold, "density threshold override");
  sub->callback([sub, manifest_path, out, passive_out, faces, resolution, threshold, config]() {
    apply_config(sub, *config);
    require_file(*manifest_path);
    SceneManifest manifest = read_scene_manifest(*manifest_path);
    if (*faces > 0) manifest.extraction.target_faces = *faces;
    if (*resolution > 0) manifest.extraction.resolution = *resolution;
    if (*threshold > 0) manifest.extraction.threshold = *threshold;

    const std::string field_path = resolve_near(*manifest_path, manifest.field_path);
    require_file(field_path);
    const auto field = read_grid(field_path);
    const MaskSet views = load_views(manifest, *manifest_path);
    const SceneWithHistory scene = perceive_scene(*field, views, manifest.extraction,
                                                  manifest.active_props, manifest.passive_props,
                                                  manifest.history_offset);
    const int active = active_object_index(scene.scene);
    const TriMesh& active_mesh = scene.scene.objects[active].ref_mesh;
    write_obj(active_mesh, *out);
    log_info("active mesh: " + std::to_string(active_mesh.vertices.size()) + " vertices, " +
             std::to_string(active_mesh.faces.size()) + " faces -> " + *out);
    if (!passive_out->empty()) {
      const TriMesh& passive_mesh = scene.scene.objects[1 - active].ref_mesh;
      write_obj(passive_mesh, *passive_out);
      log_info("passive mesh: " + std::to_string(passive_mesh.faces.size()) + " faces -> " +
               *passive_out);
    }
  });
}

void setup_rollout(CLI::App& app) {
  auto* sub = app.add_subcommand("rollout", "Roll a checkpoint forward from an initial state");
  auto ckpt = std::make_shared<std::string>();
  auto manifest_path = std::make_shared<std::string>();
  auto trajectory_path = std::make_shared<std::string>();
  auto horizon = std::make_shared<int>(30);
  auto radius = std::make_shared<double>(0.1);
  auto out_transforms = std::make_shared<std::string>();
  auto out_states = std::make_shared<std::string>();
  auto config = std::make_shared<std::string>();
  sub->add_option("--config", *config, "JSON config file; explicit flags win");
  sub->add_option("--checkpoint", *ckpt, "trained checkpoint")->required();
  sub->add_option("--manifest", *manifest_path,
                  "perception scene manifest (initial state from masks + field)");
  sub->add_option("--trajectory", *trajectory_path,
                  "trajectory file (initial state from its first two frames)");
  sub->add_option("--horizon", *horizon, "rollout steps");
  sub->add_option("--collision-radius", *radius, "face-face search radius");
  sub->add_option("--out-transforms", *out_transforms,
                  "active-object transform list JSON (render-edit input)");
  sub->add_option("--out-states", *out_states, "full per-step pose list JSON");
  sub->callback([sub, ckpt, manifest_path, trajectory_path, horizon, radius, out_transforms,
                 out_states, config]() {
    apply_config(sub, *config);
    require_file(*ckpt);
    if (manifest_path->empty() == trajectory_path->empty()) {
      throw CLI::ValidationError("rollout", "exactly one of --manifest/--trajectory required");
    }
    const Checkpoint checkpoint = load_checkpoint(*ckpt);

    Scene scene;
    FrameState prev, curr;
    if (!manifest_path->empty()) {
      SceneWithHistory s = perceive_from_manifest(*manifest_path);
      scene = std::move(s.scene);
      prev = std::move(s.prev);
      curr = std::move(s.curr);
    } else {
      require_file(*trajectory_path);
      const Trajectory truth = read_trajectory(*trajectory_path);
      if (truth.frames.size() < 2) throw InvalidSpec("trajectory needs >= 2 frames");
      scene = truth.scene;
      prev = truth.frames[0];
      curr = truth.frames[1];
    }

    const RolloutResult result =
        rollout(checkpoint.params, checkpoint.norms, scene, prev, curr, *horizon, *radius);
    log_info("rolled out " + std::to_string(result.frames.size() - 1) + " steps" +
             (result.diverged ? " (diverged early)" : ""));

    const int active = active_object_index(scene);
    if (!out_transforms->empty()) {
      const Aabb volume = object_bounds(result.frames[0].objects[active]);
      const RigidTransform base_inv = result.frames[0].objects[active].pose.inverse();
      std::vector<RigidTransform> rel;
      for (const FrameState& f : result.frames) {
        rel.push_back(f.objects[active].pose.compose(base_inv));
      }
      write_transforms_json(volume, rel, *out_transforms);
      log_info("wrote " + std::to_string(rel.size()) + " transforms to " + *out_transforms);
    }
    if (!out_states->empty()) {
      json steps = json::array();
      for (const FrameState& f : result.frames) {
        json poses = json::array();
        for (const ObjectState& o : f.objects) poses.push_back(transform_json(o.pose));
        steps.push_back(std::move(poses));
      }
      const json j = {{"horizon", result.horizon},
                      {"diverged", result.diverged},
                      {"steps", std::move(steps)}};
      std::ofstream out(*out_states);
      if (!out) throw IoError("cannot write states: " + *out_states);
      out << j.dump(2) << "\n";
    }
  });
}

void setup_render_edit(CLI::App& app, const std::shared_ptr<int>& threads) {
  auto* sub = app.add_subcommand("render-edit",
                                 "Render the field with the active volume moved per transform");
  auto field_path = std::make_shared<std::string>();
  auto camera_path = std::make_shared<std::string>();
  auto transforms_path = std::make_shared<std::string>();
  auto mode = std::make_shared<std::string>("move");
  auto out_dir = std::make_shared<std::string>(default_out_dir());
  auto step_size = std::make_shared<double>(0.01);
  auto write_depth = std::make_shared<bool>(false);
  auto config = std::make_shared<std::string>();
  sub->add_option("--config", *config, "JSON config file; explicit flags win");
  sub->add_option("--field", *field_path, "density grid file")->required();
  sub->add_option("--camera", *camera_path, "camera JSON")->required();
  sub->add_option("--transforms", *transforms_path, "transform list JSON from rollout")
      ->required();
  sub->add_option("--mode", *mode, "edit mode: move or duplicate");
  sub->add_option("--out", *out_dir, "output directory for numbered PPM frames");
  sub->add_option("--step-size", *step_size, "ray-march step in meters");
  sub->add_flag("--depth", *write_depth, "also write 16-bit depth PGMs");
  sub->callback([sub, field_path, camera_path, transforms_path, mode, out_dir, step_size,
                 write_depth, threads, config]() {
    apply_config(sub, *config);
    BendMode bend_mode;
    if (*mode == "move") {
      bend_mode = BendMode::kMove;
    } else if (*mode == "duplicate") {
      bend_mode = BendMode::kDuplicate;
    } else {
      throw CLI::ValidationError("--mode", "expected move or duplicate");
    }
    require_file(*field_path);
    require_file(*camera_path);

    const auto field = read_grid(*field_path);
    const CameraModel camera = read_camera_json(*camera_path);
    Aabb volume;
    std::vector<RigidTransform> transforms;
    read_transforms_json(*transforms_path, volume, transforms);
    fs::create_directories(*out_dir);

    for (size_t i = 0; i < transforms.size(); ++i) {
      BendSpec spec;
      spec.mode = bend_mode;
      spec.volume = volume;
      spec.transform = transforms[i];
      const RenderResult frame = render(*field, camera, spec, *step_size, *threads);
      char name[32];
      std::snprintf(name, sizeof(name), "frame_%04d.ppm", static_cast<int>(i));
      write_ppm(frame.image, (fs::path(*out_dir) / name).string());
      if (*write_depth) {
        std::snprintf(name, sizeof(name), "depth_%04d.pgm", static_cast<int>(i));
        write_depth_pgm(frame.depth, (fs::path(*out_dir) / name).string());
      }
      log_debug("rendered frame " + std::to_string(i));
    }
    log_info("wrote " + std::to_string(transforms.size()) + " frames to " + *out_dir);
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learned rigid-body simulation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  auto threads = std::make_shared<int>(1);
  app.add_option("--log-level", "debug|info|warn|error")
      ->each([](const std::string& s) { g_log_level = parse_log_level(s); });
  app.add_option("--threads", *threads, "worker threads for rendering");

  setup_gen_data(app);
  setup_train(app);
  setup_eval(app);
  setup_bench_graph(app);
  setup_extract_mesh(app);
  setup_rollout(app);
  setup_render_edit(app, threads);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
