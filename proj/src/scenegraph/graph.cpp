#include "figsim/scenegraph/scene.hpp"

#include "figsim/error.hpp"

namespace figsim {

FrameState make_frame(const Scene& scene, const std::vector<RigidTransform>& poses) {
  if (poses.size() != scene.objects.size()) {
    throw LengthMismatch("make_frame: one pose per object required");
  }
  FrameState frame;
  frame.objects.resize(scene.objects.size());
  for (size_t i = 0; i < scene.objects.size(); ++i) {
    frame.objects[i].pose = poses[i];
    const auto& ref = scene.objects[i].ref_mesh.vertices;
    auto& out = frame.objects[i].vertices;
    out.resize(ref.size());
    for (size_t v = 0; v < ref.size(); ++v) out[v] = poses[i].apply(ref[v]);
  }
  return frame;
}

}  // namespace figsim
