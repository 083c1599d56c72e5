#include "figsim/fields/render.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "figsim/error.hpp"

namespace figsim {
namespace {

//! Entry/exit parameters of a ray against a box; false if it misses.
bool ray_box(const Vec3& origin, const Vec3& dir, const Aabb& box, double& t0, double& t1) {
  t0 = 0.0;
  t1 = std::numeric_limits<double>::max();
  for (int i = 0; i < 3; ++i) {
    if (std::fabs(dir[i]) < 1e-300) {
      if (origin[i] < box.min[i] || origin[i] > box.max[i]) return false;
      continue;
    }
    double a = (box.min[i] - origin[i]) / dir[i];
    double b = (box.max[i] - origin[i]) / dir[i];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
  }
  return t0 <= t1;
}

}  // namespace

RenderResult render(const DensityField& field, const CameraModel& camera,
                    const std::optional<BendSpec>& spec, double step_size, int threads) {
  if (step_size <= 0.0) throw InvalidSpec("render: step_size must be > 0");

  FieldPtr edited;
  const DensityField* f = &field;
  if (spec) {
    // The renderer does not own `field`; wrap it without taking ownership.
    edited = std::make_shared<BentField>(FieldPtr(&field, [](const DensityField*) {}), *spec);
    f = edited.get();
  }

  // March the full scene bounds, expanded a little so boundary samples count.
  const Aabb box = f->bounds().expanded(Vec3{step_size, step_size, step_size});

  RenderResult out;
  out.image.width = camera.width;
  out.image.height = camera.height;
  out.image.pixels.assign(size_t(camera.width) * camera.height * 4, 0.0f);
  out.depth.width = camera.width;
  out.depth.height = camera.height;
  out.depth.depth.assign(size_t(camera.width) * camera.height, 0.0f);

  const Vec3 forward = camera.camera_to_world.rotation.rotate({0, 0, 1});

  auto render_row = [&](int y) {
    for (int x = 0; x < camera.width; ++x) {
      Vec3 origin, dir;
      camera.pixel_ray(x, y, origin, dir);
      double t0, t1;
      if (!ray_box(origin, dir, box, t0, t1)) continue;

      double transmittance = 1.0;
      Vec3 rgb;
      double depth_acc = 0.0;
      double weight_acc = 0.0;
      for (double t = t0 + 0.5 * step_size; t < t1; t += step_size) {
        const Vec3 p = origin + t * dir;
        const double sigma = f->density(p);
        if (sigma <= 0.0) continue;
        const double alpha = 1.0 - std::exp(-sigma * step_size);
        const double w = transmittance * alpha;
        rgb += w * f->color(p);
        depth_acc += w * t;
        weight_acc += w;
        transmittance *= 1.0 - alpha;
        if (transmittance < 1e-6) break;
      }

      float* px = out.image.at(x, y);
      px[0] = static_cast<float>(rgb.x);
      px[1] = static_cast<float>(rgb.y);
      px[2] = static_cast<float>(rgb.z);
      px[3] = static_cast<float>(1.0 - transmittance);
      if (weight_acc > 0.0) {
        // z-depth along the camera forward axis (matches mask unprojection).
        out.depth.at(x, y) = static_cast<float>(depth_acc / weight_acc * dir.dot(forward));
      }
    }
  };

  if (threads <= 1) {
    for (int y = 0; y < camera.height; ++y) render_row(y);
  } else {
    std::vector<std::thread> pool;
    for (int tid = 0; tid < threads; ++tid) {
      pool.emplace_back([&, tid] {
        for (int y = tid; y < camera.height; y += threads) render_row(y);
      });
    }
    for (auto& th : pool) th.join();
  }
  return out;
}

}  // namespace figsim
