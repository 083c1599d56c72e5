#include "figsim/rollout_eval/rollout.hpp"

#include "figsim/error.hpp"
#include "figsim/geometry/kabsch.hpp"

namespace figsim {
namespace {

bool is_dynamic(const SceneObject& obj) { return !obj.props.static_flag && obj.props.mass > 0.0; }

//! Shared recursion; step() fills the per-vertex predicted positions for the
//! whole frame, flattened in scene order.
template <typename StepFn>
RolloutResult run_rollout(const Scene& scene, const FrameState& prev, const FrameState& curr,
                          int horizon, StepFn&& step) {
  if (horizon < 1) throw InvalidSpec("rollout: horizon must be >= 1");
  RolloutResult result;
  result.horizon = horizon;
  result.frames.reserve(horizon + 1);
  result.frames.push_back(curr);

  FrameState state_prev = prev;
  FrameState state_curr = curr;
  for (int t = 0; t < horizon; ++t) {
    std::vector<Vec3> predicted;
    try {
      predicted = step(state_prev, state_curr);
    } catch (const NonFiniteActivation&) {
      result.diverged = true;
      return result;
    }

    FrameState next = state_curr;  // static objects stay frozen
    size_t cursor = 0;
    bool finite = true;
    for (size_t i = 0; i < scene.objects.size(); ++i) {
      const SceneObject& obj = scene.objects[i];
      const size_t n = obj.ref_mesh.vertices.size();
      if (is_dynamic(obj)) {
        std::vector<Vec3> verts(predicted.begin() + cursor, predicted.begin() + cursor + n);
        for (const Vec3& p : verts) finite &= p.is_finite();
        if (!finite) break;
        const RigidTransform pose =
            rigid_project(verts, obj.ref_mesh, state_curr.objects[i].pose);
        next.objects[i].pose = pose;
        for (size_t v = 0; v < n; ++v) {
          next.objects[i].vertices[v] = pose.apply(obj.ref_mesh.vertices[v]);
        }
      }
      cursor += n;
    }
    if (!finite) {
      result.diverged = true;
      return result;
    }
    result.frames.push_back(next);
    state_prev = std::move(state_curr);
    state_curr = next;
  }
  return result;
}

}  // namespace

RigidTransform rigid_project(const std::vector<Vec3>& predicted, const TriMesh& reference,
                             const RigidTransform& previous_pose) {
  if (predicted.size() != reference.vertices.size()) {
    throw LengthMismatch("rigid_project: vertex count mismatch");
  }
  RigidTransform pose = kabsch_fit(reference.vertices, predicted);
  const Quat& q = pose.rotation;
  const Quat& p = previous_pose.rotation;
  if (q.w * p.w + q.x * p.x + q.y * p.y + q.z * p.z < 0.0) {
    pose.rotation = Quat{-q.w, -q.x, -q.y, -q.z};
  }
  return pose;
}

RolloutResult rollout(const ModelParams& params, const NormalizerSet& norms, const Scene& scene,
                      const FrameState& prev, const FrameState& curr, int horizon,
                      double collision_radius) {
  return run_rollout(scene, prev, curr, horizon,
                     [&](const FrameState& p, const FrameState& c) {
                       const SceneGraph graph =
                           build_graph(scene, c, p, params.config.mode, collision_radius);
                       const std::vector<Vec3> accel =
                           predict_accelerations(params, graph, norms);
                       std::vector<Vec3> out(accel.size());
                       size_t cursor = 0;
                       for (size_t i = 0; i < scene.objects.size(); ++i) {
                         for (size_t v = 0; v < scene.objects[i].ref_mesh.vertices.size(); ++v) {
                           out[cursor] = 2.0 * c.objects[i].vertices[v] -
                                         p.objects[i].vertices[v] + accel[cursor];
                           ++cursor;
                         }
                       }
                       return out;
                     });
}

RolloutResult constant_velocity_rollout(const Scene& scene, const FrameState& prev,
                                        const FrameState& curr, int horizon) {
  return run_rollout(scene, prev, curr, horizon,
                     [&](const FrameState& p, const FrameState& c) {
                       std::vector<Vec3> out;
                       for (size_t i = 0; i < scene.objects.size(); ++i) {
                         for (size_t v = 0; v < scene.objects[i].ref_mesh.vertices.size(); ++v) {
                           out.push_back(2.0 * c.objects[i].vertices[v] -
                                         p.objects[i].vertices[v]);
                         }
                       }
                       return out;
                     });
}

}  // namespace figsim
