#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "figsim/learned_sim/tensor.hpp"
#include "figsim/scenegraph/graph.hpp"

namespace figsim {

struct ModelConfig {
  GraphMode mode = GraphMode::kFignetStar;
  int message_passing_steps = 10;
  int hidden = 128;
};

//! Parameter tensors in fixed declaration order (checkpoint blob order).
struct ModelParams {
  ModelConfig config;
  std::vector<std::string> names;
  std::vector<Tensor> tensors;
};

//! Indices into ModelParams::tensors for one MLP (2 hidden layers) plus the
//! trailing LayerNorm when present.
struct MlpRef {
  int w1 = -1, b1 = -1, w2 = -1, b2 = -1, w3 = -1, b3 = -1;
  int ln_scale = -1, ln_shift = -1;
};

struct ModelLayout {
  MlpRef mesh_encoder;
  MlpRef object_encoder;
  MlpRef nn_edge_encoder;  // fignet mode only
  MlpRef vo_edge_encoder;
  MlpRef ov_edge_encoder;
  MlpRef ff_edge_encoder;
  struct Step {
    MlpRef nn_edge;  // fignet mode only
    MlpRef vo_edge;
    MlpRef ov_edge;
    MlpRef ff_edge;
    MlpRef mesh_node;
    MlpRef object_node;
  };
  std::vector<Step> steps;
  MlpRef decoder;
};

ModelLayout model_layout(const ModelConfig& config);

//! Truncated-normal fan-in init; zero biases; unit LayerNorm scales; the
//! final decoder layer zeroed so an untrained model predicts zero
//! acceleration.
ModelParams init_model(const ModelConfig& config, uint64_t seed);

//! Running per-channel statistics with a std floor of 1e-8.
class RunningStat {
 public:
  explicit RunningStat(int width);
  void add(const double* row);
  void add_rows(const std::vector<double>& flat);
  int width() const { return width_; }
  uint64_t count() const { return count_; }
  Tensor mean() const;
  Tensor std_dev() const;

  static constexpr double kStdFloor = 1e-8;

 private:
  int width_;
  uint64_t count_ = 0;
  std::vector<double> sum_;
  std::vector<double> sum_sq_;
};

struct Moments {
  Tensor mean;     // 1 x n
  Tensor std_dev;  // 1 x n, floored

  //! (x - mean) / std, row-major flat input.
  Tensor normalize(const std::vector<double>& flat) const;
};

Moments identity_moments(int width);
Moments moments_of(const RunningStat& stat);

struct NormalizerSet {
  Moments node;         // mesh and object node features
  Moments node_node;    // fignet mode only
  Moments vert_to_obj;
  Moments obj_to_vert;
  Moments face_face;
  Moments accel;        // per-vertex finite-difference acceleration targets
};

NormalizerSet identity_normalizers();

//! Normalized per-mesh-vertex acceleration, N x 3.
Tensor model_forward(const ModelParams& params, const SceneGraph& graph,
                     const NormalizerSet& norms);

//! MSE over dynamic mesh vertices of predicted positions
//! x_hat = 2 x_t - x_prev + denormalize(forward(...)).
double model_loss(const ModelParams& params, const SceneGraph& graph,
                  const std::vector<Vec3>& prev_positions,
                  const std::vector<Vec3>& target_positions, const NormalizerSet& norms);

//! Loss plus exact reverse-mode gradients, aligned with params.tensors.
double model_loss_grad(const ModelParams& params, const SceneGraph& graph,
                       const std::vector<Vec3>& prev_positions,
                       const std::vector<Vec3>& target_positions, const NormalizerSet& norms,
                       std::vector<Tensor>& grads);

//! Denormalized accelerations as world-space vectors (rollout integration).
std::vector<Vec3> predict_accelerations(const ModelParams& params, const SceneGraph& graph,
                                        const NormalizerSet& norms);

}  // namespace figsim
