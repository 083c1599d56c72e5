#include <random>

#include "figsim/error.hpp"
#include "figsim/learned_sim/model.hpp"
#include "figsim/learned_sim/tape.hpp"

namespace figsim {
namespace {

//! Walks the parameter declaration order; optionally materializes tensors.
struct Builder {
  ModelParams* params;
  std::mt19937_64 rng;
  int next = 0;
  int hidden;

  double truncated_normal(double stddev) {
    std::normal_distribution<double> dist(0.0, stddev);
    double x;
    do {
      x = dist(rng);
    } while (std::fabs(x) > 2.0 * stddev);
    return x;
  }

  int tensor(const std::string& name, int rows, int cols, bool fan_in_init) {
    if (params) {
      Tensor t(rows, cols);
      if (fan_in_init) {
        const double stddev = 1.0 / std::sqrt(double(rows));
        for (double& v : t.v) v = truncated_normal(stddev);
      }
      params->names.push_back(name);
      params->tensors.push_back(std::move(t));
    }
    return next++;
  }

  int ones(const std::string& name, int cols) {
    if (params) {
      Tensor t(1, cols);
      for (double& v : t.v) v = 1.0;
      params->names.push_back(name);
      params->tensors.push_back(std::move(t));
    }
    return next++;
  }

  MlpRef mlp(const std::string& name, int in, int out, bool layer_norm, bool zero_last = false) {
    MlpRef m;
    m.w1 = tensor(name + ".w1", in, hidden, true);
    m.b1 = tensor(name + ".b1", 1, hidden, false);
    m.w2 = tensor(name + ".w2", hidden, hidden, true);
    m.b2 = tensor(name + ".b2", 1, hidden, false);
    m.w3 = tensor(name + ".w3", hidden, out, !zero_last);
    m.b3 = tensor(name + ".b3", 1, out, false);
    if (layer_norm) {
      m.ln_scale = ones(name + ".ln_scale", out);
      m.ln_shift = tensor(name + ".ln_shift", 1, out, false);
    }
    return m;
  }
};

ModelLayout build(const ModelConfig& config, ModelParams* params, uint64_t seed) {
  Builder b{params, std::mt19937_64(seed), 0, config.hidden};
  const int h = config.hidden;
  const bool full = config.mode == GraphMode::kFignet;

  ModelLayout layout;
  layout.mesh_encoder = b.mlp("encoder.mesh_node", kNodeFeatureWidth, h, true);
  layout.object_encoder = b.mlp("encoder.object_node", kNodeFeatureWidth, h, true);
  if (full) layout.nn_edge_encoder = b.mlp("encoder.node_node", kNodeNodeFeatureWidth, h, true);
  layout.vo_edge_encoder = b.mlp("encoder.vert_to_obj", kObjectNodeFeatureWidth, h, true);
  layout.ov_edge_encoder = b.mlp("encoder.obj_to_vert", kObjectNodeFeatureWidth, h, true);
  layout.ff_edge_encoder = b.mlp("encoder.face_face", kFaceFaceFeatureWidth, h, true);

  layout.steps.resize(config.message_passing_steps);
  for (int p = 0; p < config.message_passing_steps; ++p) {
    const std::string prefix = "processor." + std::to_string(p);
    ModelLayout::Step& s = layout.steps[p];
    if (full) s.nn_edge = b.mlp(prefix + ".node_node", 3 * h, h, true);
    s.vo_edge = b.mlp(prefix + ".vert_to_obj", 3 * h, h, true);
    s.ov_edge = b.mlp(prefix + ".obj_to_vert", 3 * h, h, true);
    s.ff_edge = b.mlp(prefix + ".face_face", 3 * h, h, true);
    s.mesh_node = b.mlp(prefix + ".mesh_node", (full ? 4 : 3) * h, h, true);
    s.object_node = b.mlp(prefix + ".object_node", 2 * h, h, true);
  }
  layout.decoder = b.mlp("decoder", h, 3, false, true);
  return layout;
}

//! Leaves for every parameter tensor, aligned with params.tensors.
std::vector<int> param_leaves(Tape& tape, const ModelParams& params) {
  std::vector<int> leaves;
  leaves.reserve(params.tensors.size());
  for (const Tensor& t : params.tensors) leaves.push_back(tape.leaf(t));
  return leaves;
}

int apply_mlp(Tape& tape, const std::vector<int>& leaves, const MlpRef& m, int x) {
  int y = tape.relu(tape.add_bias(tape.matmul(x, leaves[m.w1]), leaves[m.b1]));
  y = tape.relu(tape.add_bias(tape.matmul(y, leaves[m.w2]), leaves[m.b2]));
  y = tape.add_bias(tape.matmul(y, leaves[m.w3]), leaves[m.b3]);
  if (m.ln_scale >= 0) y = tape.layernorm(y, leaves[m.ln_scale], leaves[m.ln_shift]);
  return y;
}

std::vector<int> face_face_vertex_index(const SceneGraph& graph, bool senders, int k) {
  std::vector<int> idx(graph.face_face.size());
  for (size_t i = 0; i < graph.face_face.size(); ++i) {
    idx[i] = senders ? graph.face_face[i].sender_verts[k] : graph.face_face[i].receiver_verts[k];
  }
  return idx;
}

//! Encode-Process-Decode; returns the N x 3 normalized-acceleration node id.
int build_forward(Tape& tape, const ModelParams& params, const ModelLayout& layout,
                  const SceneGraph& graph, const NormalizerSet& norms,
                  const std::vector<int>& leaves) {
  if (graph.mode != params.config.mode) {
    throw InvalidSpec("model_forward: graph mode does not match checkpoint mode");
  }
  const bool full = params.config.mode == GraphMode::kFignet;
  const int n_mesh = graph.num_mesh_nodes();
  const int n_obj = graph.num_object_nodes();

  const int mesh_in = tape.constant(norms.node.normalize(graph.mesh_node_features));
  const int obj_in = tape.constant(norms.node.normalize(graph.object_node_features));
  int h_mesh = apply_mlp(tape, leaves, layout.mesh_encoder, mesh_in);
  int h_obj = apply_mlp(tape, leaves, layout.object_encoder, obj_in);

  int e_nn = -1;
  if (full) {
    const int nn_in = tape.constant(norms.node_node.normalize(graph.node_node.features));
    e_nn = apply_mlp(tape, leaves, layout.nn_edge_encoder, nn_in);
  }
  const int vo_in = tape.constant(norms.vert_to_obj.normalize(graph.vert_to_obj.features));
  int e_vo = apply_mlp(tape, leaves, layout.vo_edge_encoder, vo_in);
  const int ov_in = tape.constant(norms.obj_to_vert.normalize(graph.obj_to_vert.features));
  int e_ov = apply_mlp(tape, leaves, layout.ov_edge_encoder, ov_in);
  const int ff_in = tape.constant(norms.face_face.normalize(graph.face_face_features));
  int e_ff = apply_mlp(tape, leaves, layout.ff_edge_encoder, ff_in);

  for (const ModelLayout::Step& step : layout.steps) {
    // edge updates: MLP([edge latent, sender latent, receiver latent]) + residual
    int e_nn_new = -1;
    if (full) {
      const int hs = tape.gather_rows(h_mesh, graph.node_node.senders);
      const int hr = tape.gather_rows(h_mesh, graph.node_node.receivers);
      e_nn_new = tape.add(e_nn, apply_mlp(tape, leaves, step.nn_edge, tape.concat_cols({e_nn, hs, hr})));
    }
    const int vo_s = tape.gather_rows(h_mesh, graph.vert_to_obj.senders);
    const int vo_r = tape.gather_rows(h_obj, graph.vert_to_obj.receivers);
    const int e_vo_new =
        tape.add(e_vo, apply_mlp(tape, leaves, step.vo_edge, tape.concat_cols({e_vo, vo_s, vo_r})));
    const int ov_s = tape.gather_rows(h_obj, graph.obj_to_vert.senders);
    const int ov_r = tape.gather_rows(h_mesh, graph.obj_to_vert.receivers);
    const int e_ov_new =
        tape.add(e_ov, apply_mlp(tape, leaves, step.ov_edge, tape.concat_cols({e_ov, ov_s, ov_r})));

    // face-face hyperedges: sender and receiver triples enter as latent sums
    int ff_s = tape.gather_rows(h_mesh, face_face_vertex_index(graph, true, 0));
    int ff_r = tape.gather_rows(h_mesh, face_face_vertex_index(graph, false, 0));
    for (int k = 1; k < 3; ++k) {
      ff_s = tape.add(ff_s, tape.gather_rows(h_mesh, face_face_vertex_index(graph, true, k)));
      ff_r = tape.add(ff_r, tape.gather_rows(h_mesh, face_face_vertex_index(graph, false, k)));
    }
    const int e_ff_new =
        tape.add(e_ff, apply_mlp(tape, leaves, step.ff_edge, tape.concat_cols({e_ff, ff_s, ff_r})));

    // mesh node update from summed per-type aggregates
    std::vector<int> mesh_parts{h_mesh};
    if (full) {
      mesh_parts.push_back(tape.scatter_add_rows(e_nn_new, graph.node_node.receivers, n_mesh));
    }
    mesh_parts.push_back(tape.scatter_add_rows(e_ov_new, graph.obj_to_vert.receivers, n_mesh));
    int ff_agg = tape.scatter_add_rows(e_ff_new, face_face_vertex_index(graph, false, 0), n_mesh);
    for (int k = 1; k < 3; ++k) {
      ff_agg = tape.add(
          ff_agg, tape.scatter_add_rows(e_ff_new, face_face_vertex_index(graph, false, k), n_mesh));
    }
    mesh_parts.push_back(ff_agg);
    const int h_mesh_new =
        tape.add(h_mesh, apply_mlp(tape, leaves, step.mesh_node, tape.concat_cols(mesh_parts)));

    const int vo_agg = tape.scatter_add_rows(e_vo_new, graph.vert_to_obj.receivers, n_obj);
    const int h_obj_new =
        tape.add(h_obj, apply_mlp(tape, leaves, step.object_node, tape.concat_cols({h_obj, vo_agg})));

    h_mesh = h_mesh_new;
    h_obj = h_obj_new;
    e_vo = e_vo_new;
    e_ov = e_ov_new;
    e_ff = e_ff_new;
    if (full) e_nn = e_nn_new;
  }

  const int out = apply_mlp(tape, leaves, layout.decoder, h_mesh);
  if (!tape.value(out).is_finite()) {
    throw NonFiniteActivation("model_forward: non-finite output");
  }
  return out;
}

//! Predicted positions node: 2 x_t - x_prev + denormalized acceleration.
int build_predicted_positions(Tape& tape, const ModelParams& params, const ModelLayout& layout,
                              const SceneGraph& graph, const NormalizerSet& norms,
                              const std::vector<Vec3>& prev_positions,
                              const std::vector<int>& leaves) {
  const int n = graph.num_mesh_nodes();
  if (static_cast<int>(prev_positions.size()) != n) {
    throw LengthMismatch("model_loss: prev positions misaligned with mesh nodes");
  }
  const int out = build_forward(tape, params, layout, graph, norms, leaves);
  const int accel = tape.affine_cols(out, norms.accel.std_dev, norms.accel.mean);
  Tensor base(n, 3);
  for (int i = 0; i < n; ++i) {
    const Vec3 b = 2.0 * graph.mesh_node_positions[i] - prev_positions[i];
    base.at(i, 0) = b.x;
    base.at(i, 1) = b.y;
    base.at(i, 2) = b.z;
  }
  return tape.add_constant(accel, std::move(base));
}

int build_loss(Tape& tape, const ModelParams& params, const ModelLayout& layout,
               const SceneGraph& graph, const NormalizerSet& norms,
               const std::vector<Vec3>& prev_positions, const std::vector<Vec3>& target_positions,
               const std::vector<int>& leaves) {
  const int n = graph.num_mesh_nodes();
  if (static_cast<int>(target_positions.size()) != n) {
    throw LengthMismatch("model_loss: targets misaligned with mesh nodes");
  }
  const int pred =
      build_predicted_positions(tape, params, layout, graph, norms, prev_positions, leaves);
  Tensor target(n, 3);
  std::vector<double> weight(n);
  for (int i = 0; i < n; ++i) {
    target.at(i, 0) = target_positions[i].x;
    target.at(i, 1) = target_positions[i].y;
    target.at(i, 2) = target_positions[i].z;
    const double a_i = graph.mesh_node_features[size_t(i) * kNodeFeatureWidth + 6];
    weight[i] = a_i > 0.5 ? 0.0 : 1.0;  // static vertices excluded
  }
  return tape.weighted_mse(pred, std::move(target), std::move(weight));
}

}  // namespace

ModelLayout model_layout(const ModelConfig& config) { return build(config, nullptr, 0); }

ModelParams init_model(const ModelConfig& config, uint64_t seed) {
  ModelParams params;
  params.config = config;
  build(config, &params, seed);
  return params;
}

Tensor model_forward(const ModelParams& params, const SceneGraph& graph,
                     const NormalizerSet& norms) {
  const ModelLayout layout = model_layout(params.config);
  Tape tape;
  const std::vector<int> leaves = param_leaves(tape, params);
  const int out = build_forward(tape, params, layout, graph, norms, leaves);
  return tape.value(out);
}

double model_loss(const ModelParams& params, const SceneGraph& graph,
                  const std::vector<Vec3>& prev_positions,
                  const std::vector<Vec3>& target_positions, const NormalizerSet& norms) {
  const ModelLayout layout = model_layout(params.config);
  Tape tape;
  const std::vector<int> leaves = param_leaves(tape, params);
  const int loss =
      build_loss(tape, params, layout, graph, norms, prev_positions, target_positions, leaves);
  return tape.value(loss).at(0, 0);
}

double model_loss_grad(const ModelParams& params, const SceneGraph& graph,
                       const std::vector<Vec3>& prev_positions,
                       const std::vector<Vec3>& target_positions, const NormalizerSet& norms,
                       std::vector<Tensor>& grads) {
  const ModelLayout layout = model_layout(params.config);
  Tape tape;
  const std::vector<int> leaves = param_leaves(tape, params);
  const int loss =
      build_loss(tape, params, layout, graph, norms, prev_positions, target_positions, leaves);
  tape.backward(loss);
  grads.clear();
  grads.reserve(leaves.size());
  for (const int leaf : leaves) {
    if (!tape.grad(leaf).is_finite()) {
      throw NonFiniteGradient("model_loss_grad: non-finite gradient");
    }
    grads.push_back(tape.grad(leaf));
  }
  return tape.value(loss).at(0, 0);
}

std::vector<Vec3> predict_accelerations(const ModelParams& params, const SceneGraph& graph,
                                        const NormalizerSet& norms) {
  const Tensor out = model_forward(params, graph, norms);
  std::vector<Vec3> acc(out.rows);
  for (int i = 0; i < out.rows; ++i) {
    acc[i] = {out.at(i, 0) * norms.accel.std_dev.at(0, 0) + norms.accel.mean.at(0, 0),
              out.at(i, 1) * norms.accel.std_dev.at(0, 1) + norms.accel.mean.at(0, 1),
              out.at(i, 2) * norms.accel.std_dev.at(0, 2) + norms.accel.mean.at(0, 2)};
  }
  return acc;
}

}  // namespace figsim
