#include "figsim/learned_sim/train.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <random>

#include "figsim/error.hpp"
#include "figsim/learned_sim/checkpoint.hpp"

namespace figsim {
namespace {

struct Transition {
  const Trajectory* traj = nullptr;
  int t = 0;  // predict frame t+1 from frames t and t-1
};

std::vector<Transition> enumerate_transitions(const std::vector<Trajectory>& data) {
  std::vector<Transition> out;
  for (const Trajectory& traj : data) {
    for (int t = 1; t + 1 < static_cast<int>(traj.frames.size()); ++t) {
      out.push_back({&traj, t});
    }
  }
  if (out.empty()) throw DatasetEmpty("no usable transitions (trajectories need >= 3 frames)");
  return out;
}

bool is_dynamic(const SceneObject& obj) { return !obj.props.static_flag && obj.props.mass > 0.0; }

FrameState noisy_prev(const Trajectory& traj, int t, double noise_std, std::mt19937_64& rng) {
  FrameState prev = traj.frames[t - 1];
  if (noise_std <= 0.0) return prev;
  std::normal_distribution<double> noise(0.0, noise_std);
  for (size_t i = 0; i < prev.objects.size(); ++i) {
    if (!is_dynamic(traj.scene.objects[i])) continue;
    for (Vec3& p : prev.objects[i].vertices) {
      p.x += noise(rng);
      p.y += noise(rng);
      p.z += noise(rng);
    }
  }
  return prev;
}

void append_positions(const FrameState& frame, std::vector<Vec3>& out) {
  for (const ObjectState& s : frame.objects) {
    out.insert(out.end(), s.vertices.begin(), s.vertices.end());
  }
}

void append_edges(const DirectedEdges& src, int node_offset_s, int node_offset_r,
                  DirectedEdges& dst) {
  dst.feature_width = src.feature_width;
  for (const int s : src.senders) dst.senders.push_back(s + node_offset_s);
  for (const int r : src.receivers) dst.receivers.push_back(r + node_offset_r);
  dst.features.insert(dst.features.end(), src.features.begin(), src.features.end());
}

}  // namespace

double learning_rate(const TrainConfig& cfg, int step) {
  if (cfg.steps <= 1) return cfg.lr_start;
  const double frac = double(step) / double(cfg.steps - 1);
  return cfg.lr_start * std::pow(cfg.lr_end / cfg.lr_start, frac);
}

SceneGraph merge_graphs(const std::vector<SceneGraph>& parts) {
  if (parts.empty()) throw InvalidSpec("merge_graphs: empty batch");
  SceneGraph out;
  out.mode = parts[0].mode;
  for (const SceneGraph& g : parts) {
    if (g.mode != out.mode) throw InvalidSpec("merge_graphs: mixed graph modes");
    const int mo = out.num_mesh_nodes();
    const int oo = out.num_object_nodes();

    for (const int obj : g.mesh_node_object) out.mesh_node_object.push_back(obj + oo);
    out.mesh_node_positions.insert(out.mesh_node_positions.end(), g.mesh_node_positions.begin(),
                                   g.mesh_node_positions.end());
    out.mesh_node_features.insert(out.mesh_node_features.end(), g.mesh_node_features.begin(),
                                  g.mesh_node_features.end());
    out.object_node_positions.insert(out.object_node_positions.end(),
                                     g.object_node_positions.begin(),
                                     g.object_node_positions.end());
    out.object_node_features.insert(out.object_node_features.end(),
                                    g.object_node_features.begin(),
                                    g.object_node_features.end());

    append_edges(g.node_node, mo, mo, out.node_node);
    append_edges(g.vert_to_obj, mo, oo, out.vert_to_obj);
    append_edges(g.obj_to_vert, oo, mo, out.obj_to_vert);
    for (const FaceFaceEdge& e : g.face_face) {
      FaceFaceEdge shifted = e;
      for (int& v : shifted.sender_verts) v += mo;
      for (int& v : shifted.receiver_verts) v += mo;
      out.face_face.push_back(shifted);
    }
    out.face_face_features.insert(out.face_face_features.end(), g.face_face_features.begin(),
                                  g.face_face_features.end());
  }
  return out;
}

NormalizerSet fit_normalizers(const std::vector<Trajectory>& data, const TrainConfig& cfg,
                              uint64_t seed) {
  const std::vector<Transition> transitions = enumerate_transitions(data);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<size_t> pick(0, transitions.size() - 1);

  RunningStat node(kNodeFeatureWidth);
  RunningStat nn(kNodeNodeFeatureWidth);
  RunningStat vo(kObjectNodeFeatureWidth);
  RunningStat ov(kObjectNodeFeatureWidth);
  RunningStat ff(kFaceFaceFeatureWidth);
  RunningStat accel(3);

  const int samples = std::min<int>(cfg.normalizer_samples, static_cast<int>(transitions.size()));
  for (int s = 0; s < samples; ++s) {
    const Transition tr = transitions[pick(rng)];
    const Trajectory& traj = *tr.traj;
    const SceneGraph g = build_graph(traj.scene, traj.frames[tr.t], traj.frames[tr.t - 1],
                                     cfg.model.mode, cfg.collision_radius);
    node.add_rows(g.mesh_node_features);
    node.add_rows(g.object_node_features);
    if (cfg.model.mode == GraphMode::kFignet) nn.add_rows(g.node_node.features);
    vo.add_rows(g.vert_to_obj.features);
    ov.add_rows(g.obj_to_vert.features);
    ff.add_rows(g.face_face_features);

    for (size_t i = 0; i < traj.scene.objects.size(); ++i) {
      if (!is_dynamic(traj.scene.objects[i])) continue;
      const auto& next = traj.frames[tr.t + 1].objects[i].vertices;
      const auto& curr = traj.frames[tr.t].objects[i].vertices;
      const auto& prev = traj.frames[tr.t - 1].objects[i].vertices;
      for (size_t v = 0; v < next.size(); ++v) {
        const Vec3 a = next[v] - 2.0 * curr[v] + prev[v];
        const double row[3] = {a.x, a.y, a.z};
        accel.add(row);
      }
    }
  }

  NormalizerSet norms = identity_normalizers();
  if (node.count() > 1) norms.node = moments_of(node);
  if (nn.count() > 1) norms.node_node = moments_of(nn);
  if (vo.count() > 1) norms.vert_to_obj = moments_of(vo);
  if (ov.count() > 1) norms.obj_to_vert = moments_of(ov);
  if (ff.count() > 1) norms.face_face = moments_of(ff);
  if (accel.count() > 1) norms.accel = moments_of(accel);
  return norms;
}

TrainResult train(const std::vector<Trajectory>& data, const TrainConfig& cfg, uint64_t seed) {
  if (cfg.steps < 1 || cfg.batch < 1) throw InvalidSpec("train: steps and batch must be >= 1");
  const std::vector<Transition> transitions = enumerate_transitions(data);

  TrainResult result;
  result.norms = fit_normalizers(data, cfg, seed ^ 0x9e3779b97f4a7c15ull);
  result.params = init_model(cfg.model, seed);

  std::vector<Tensor> m_state, v_state;
  for (const Tensor& t : result.params.tensors) {
    m_state.emplace_back(t.rows, t.cols);
    v_state.emplace_back(t.rows, t.cols);
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<size_t> pick(0, transitions.size() - 1);
  std::vector<Tensor> grads;
  result.losses.reserve(cfg.steps);

  std::ofstream curve;
  if (!cfg.loss_curve_path.empty()) {
    curve.open(cfg.loss_curve_path);
    if (!curve) throw IoError("cannot write loss curve: " + cfg.loss_curve_path);
    curve << "step,lr,loss\n";
  }

  const auto start = std::chrono::steady_clock::now();
  for (int step = 0; step < cfg.steps; ++step) {
    std::vector<SceneGraph> graphs;
    std::vector<Vec3> prev_positions, target_positions;
    graphs.reserve(cfg.batch);
    for (int b = 0; b < cfg.batch; ++b) {
      const Transition tr = transitions[pick(rng)];
      const Trajectory& traj = *tr.traj;
      const FrameState prev = noisy_prev(traj, tr.t, cfg.noise_std, rng);
      graphs.push_back(build_graph(traj.scene, traj.frames[tr.t], prev, cfg.model.mode,
                                   cfg.collision_radius));
      append_positions(prev, prev_positions);
      append_positions(traj.frames[tr.t + 1], target_positions);
    }
    const SceneGraph batch = merge_graphs(graphs);

    const double loss =
        model_loss_grad(result.params, batch, prev_positions, target_positions, result.norms,
                        grads);
    result.losses.push_back(loss);

    const double lr = learning_rate(cfg, step);
    const double bc1 = 1.0 - std::pow(cfg.beta1, step + 1);
    const double bc2 = 1.0 - std::pow(cfg.beta2, step + 1);
    for (size_t k = 0; k < grads.size(); ++k) {
      Tensor& theta = result.params.tensors[k];
      Tensor& m = m_state[k];
      Tensor& v = v_state[k];
      for (size_t i = 0; i < theta.v.size(); ++i) {
        const double g = grads[k].v[i];
        m.v[i] = cfg.beta1 * m.v[i] + (1.0 - cfg.beta1) * g;
        v.v[i] = cfg.beta2 * v.v[i] + (1.0 - cfg.beta2) * g * g;
        theta.v[i] -= lr * (m.v[i] / bc1) / (std::sqrt(v.v[i] / bc2) + cfg.adam_eps);
      }
    }

    if (curve.is_open()) curve << step << "," << lr << "," << loss << "\n";
    if (!cfg.checkpoint_path.empty() && cfg.checkpoint_every > 0 &&
        (step + 1) % cfg.checkpoint_every == 0) {
      save_checkpoint(result.params, result.norms, cfg.checkpoint_path);
    }
  }
  const auto end = std::chrono::steady_clock::now();
  result.ms_per_step =
      std::chrono::duration<double, std::milli>(end - start).count() / double(cfg.steps);

  if (!cfg.checkpoint_path.empty()) {
    save_checkpoint(result.params, result.norms, cfg.checkpoint_path);
  }
  return result;
}

}  // namespace figsim
