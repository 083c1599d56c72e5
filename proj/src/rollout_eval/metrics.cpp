#include "figsim/rollout_eval/rollout.hpp"

#include <cmath>

#include "figsim/error.hpp"

namespace figsim {
namespace {

bool is_dynamic(const SceneObject& obj) { return !obj.props.static_flag && obj.props.mass > 0.0; }

}  // namespace

EvalReport evaluate(const RolloutResult& result, const Trajectory& truth, int horizon,
                    int offset) {
  if (horizon < 1) throw InvalidSpec("evaluate: horizon must be >= 1");
  if (horizon >= static_cast<int>(result.frames.size()) ||
      offset + horizon >= static_cast<int>(truth.frames.size())) {
    throw LengthMismatch("evaluate: horizon exceeds rollout or trajectory length");
  }

  std::vector<size_t> dynamic;
  for (size_t i = 0; i < truth.scene.objects.size(); ++i) {
    if (is_dynamic(truth.scene.objects[i])) dynamic.push_back(i);
  }
  if (dynamic.empty()) throw InvalidSpec("evaluate: no dynamic objects");

  EvalReport report;
  for (int k = 1; k <= horizon; ++k) {
    double trans_sq = 0.0, rot_sq = 0.0;
    for (const size_t i : dynamic) {
      if (result.frames[k].objects.size() != truth.frames[offset + k].objects.size()) {
        throw LengthMismatch("evaluate: object count mismatch");
      }
      const RigidTransform& a = result.frames[k].objects[i].pose;
      const RigidTransform& b = truth.frames[offset + k].objects[i].pose;
      const double dt_norm = (a.translation - b.translation).norm();
      trans_sq += dt_norm * dt_norm;
      const double rot = rotation_error_deg(a, b);
      rot_sq += rot * rot;
    }
    report.translation_curve.push_back(std::sqrt(trans_sq / dynamic.size()));
    report.rotation_curve.push_back(std::sqrt(rot_sq / dynamic.size()));
  }
  report.translation_rmse = report.translation_curve.back();
  report.rotation_rmse_deg = report.rotation_curve.back();
  return report;
}


}  // namespace figsim
