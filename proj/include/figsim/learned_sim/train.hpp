#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "figsim/groundtruth/dataset.hpp"
#include "figsim/learned_sim/model.hpp"

namespace figsim {

struct TrainConfig {
  ModelConfig model;
  int steps = 50000;
  int batch = 8;
  double lr_start = 1e-3;
  double lr_end = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double noise_std = 3e-4;  // Gaussian noise on previous-frame vertex positions
  double collision_radius = 0.1;
  int normalizer_samples = 200;  // transition samples used to fit input statistics
  int checkpoint_every = 5000;   // 0 disables periodic saves
  std::string checkpoint_path;   // empty disables checkpointing
  std::string loss_curve_path;   // empty disables the CSV
};

//! Exponential decay from lr_start at step 0 to lr_end at the last step.
double learning_rate(const TrainConfig& cfg, int step);

//! Disjoint union of graphs with mesh/object node index offsets. Samples
//! never interact, so a batch runs as a single forward pass.
SceneGraph merge_graphs(const std::vector<SceneGraph>& parts);

//! Input/target statistics over random transition samples: node and edge
//! features plus finite-difference accelerations of dynamic vertices.
NormalizerSet fit_normalizers(const std::vector<Trajectory>& data, const TrainConfig& cfg,
                              uint64_t seed);

struct TrainResult {
  ModelParams params;
  NormalizerSet norms;
  std::vector<double> losses;  // one entry per step
  double ms_per_step = 0.0;
};

//! Adam on the one-step position MSE over random transition batches.
//! Deterministic per seed.
TrainResult train(const std::vector<Trajectory>& data, const TrainConfig& cfg, uint64_t seed);

}  // namespace figsim
