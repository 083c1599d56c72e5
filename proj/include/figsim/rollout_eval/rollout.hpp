#pragma once

#include <vector>

#include "figsim/groundtruth/simulate.hpp"
#include "figsim/learned_sim/model.hpp"

namespace figsim {

struct RolloutResult {
  int horizon = 0;                 // requested step count
  std::vector<FrameState> frames;  // frames[0] is the provided current state
  bool diverged = false;           // aborted on a non-finite prediction
};

//! Least-squares rigid pose mapping the reference mesh onto the predicted
//! vertices (proper rotation only). The quaternion sign follows
//! previous_pose for continuity.
RigidTransform rigid_project(const std::vector<Vec3>& predicted, const TriMesh& reference,
                             const RigidTransform& previous_pose);

//! Recursive one-step prediction: build graph, predict accelerations,
//! integrate per vertex, project each dynamic object back to a rigid pose.
//! Static objects stay frozen. A non-finite prediction aborts with the steps
//! so far and diverged = true.
RolloutResult rollout(const ModelParams& params, const NormalizerSet& norms, const Scene& scene,
                      const FrameState& prev, const FrameState& curr, int horizon,
                      double collision_radius);

//! Per-vertex constant-velocity extrapolation with the same rigid
//! projection; the accuracy baseline.
RolloutResult constant_velocity_rollout(const Scene& scene, const FrameState& prev,
                                        const FrameState& curr, int horizon);

struct EvalReport {
  double translation_rmse = 0.0;   // meters, at the horizon step
  double rotation_rmse_deg = 0.0;  // degrees, at the horizon step
  std::vector<double> translation_curve;  // steps 1..horizon
  std::vector<double> rotation_curve;
};

//! RMS pose errors over dynamic objects; result.frames[k] is compared with
//! truth.frames[offset + k].
EvalReport evaluate(const RolloutResult& result, const Trajectory& truth, int horizon = 50,
                    int offset = 1);

}  // namespace figsim
