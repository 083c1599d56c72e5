#include "figsim/fields/density_field.hpp"

#include <algorithm>
#include <cmath>

#include "figsim/error.hpp"
#include "figsim/fields/bend.hpp"

namespace figsim {

SphereField::SphereField(const Vec3& center, double radius, double density, const Vec3& rgb)
    : center_(center), radius_(radius), density_(density), rgb_(rgb) {}

double SphereField::density(const Vec3& x) const {
  return (x - center_).squared_norm() <= radius_ * radius_ ? density_ : 0.0;
}

Aabb SphereField::bounds() const {
  const Vec3 r{radius_, radius_, radius_};
  return {center_ - r, center_ + r};
}

BoxField::BoxField(const Aabb& box, double density, const Vec3& rgb)
    : box_(box), density_(density), rgb_(rgb) {}

double BoxField::density(const Vec3& x) const { return box_.contains(x) ? density_ : 0.0; }

UnionField::UnionField(std::vector<FieldPtr> members) : members_(std::move(members)) {}

double UnionField::density(const Vec3& x) const {
  double d = 0.0;
  for (const auto& m : members_) d = std::max(d, m->density(x));
  return d;
}

Vec3 UnionField::color(const Vec3& x) const {
  double best = -1.0;
  Vec3 c{1, 1, 1};
  for (const auto& m : members_) {
    const double d = m->density(x);
    if (d > best) {
      best = d;
      c = m->color(x);
    }
  }
  return c;
}

bool UnionField::has_color() const {
  for (const auto& m : members_) {
    if (m->has_color()) return true;
  }
  return false;
}

Aabb UnionField::bounds() const {
  Aabb b;
  for (const auto& m : members_) b.extend(m->bounds());
  return b;
}

GridField::GridField(const Vec3& origin, const Vec3& spacing, int nx, int ny, int nz,
                     std::vector<float> densities, std::vector<float> rgb, double threshold)
    : origin_(origin),
      spacing_(spacing),
      nx_(nx),
      ny_(ny),
      nz_(nz),
      data_(std::move(densities)),
      rgb_(std::move(rgb)),
      threshold_(threshold) {
  if (nx_ < 2 || ny_ < 2 || nz_ < 2) throw InvalidSpec("GridField: dims must be >= 2");
  if (data_.size() != size_t(nx_) * ny_ * nz_) throw InvalidSpec("GridField: density size mismatch");
  if (!rgb_.empty() && rgb_.size() != data_.size() * 3) {
    throw InvalidSpec("GridField: color size mismatch");
  }
  for (const float v : data_) {
    if (v < 0.0f || !std::isfinite(v)) throw InvalidSpec("GridField: densities must be >= 0");
  }
}

namespace {

struct TrilinearWeights {
  int i, j, k;
  double fx, fy, fz;
  bool inside;
};

TrilinearWeights locate(const Vec3& x, const Vec3& origin, const Vec3& spacing, int nx, int ny,
                        int nz) {
  TrilinearWeights w{};
  const double gx = (x.x - origin.x) / spacing.x;
  const double gy = (x.y - origin.y) / spacing.y;
  const double gz = (x.z - origin.z) / spacing.z;
  w.inside = gx >= 0.0 && gx <= nx - 1 && gy >= 0.0 && gy <= ny - 1 && gz >= 0.0 && gz <= nz - 1;
  if (!w.inside) return w;
  w.i = std::min(static_cast<int>(gx), nx - 2);
  w.j = std::min(static_cast<int>(gy), ny - 2);
  w.k = std::min(static_cast<int>(gz), nz - 2);
  w.fx = gx - w.i;
  w.fy = gy - w.j;
  w.fz = gz - w.k;
  return w;
}

}  // namespace

double GridField::density(const Vec3& x) const {
  const auto w = locate(x, origin_, spacing_, nx_, ny_, nz_);
  if (!w.inside) return 0.0;
  double acc = 0.0;
  for (int dk = 0; dk < 2; ++dk) {
    for (int dj = 0; dj < 2; ++dj) {
      for (int di = 0; di < 2; ++di) {
        const double wt = (di ? w.fx : 1.0 - w.fx) * (dj ? w.fy : 1.0 - w.fy) *
                          (dk ? w.fz : 1.0 - w.fz);
        acc += wt * at(w.i + di, w.j + dj, w.k + dk);
      }
    }
  }
  return acc;
}

Vec3 GridField::color(const Vec3& x) const {
  if (rgb_.empty()) return {1, 1, 1};
  const auto w = locate(x, origin_, spacing_, nx_, ny_, nz_);
  if (!w.inside) return {1, 1, 1};
  Vec3 acc;
  for (int dk = 0; dk < 2; ++dk) {
    for (int dj = 0; dj < 2; ++dj) {
      for (int di = 0; di < 2; ++di) {
        const double wt = (di ? w.fx : 1.0 - w.fx) * (dj ? w.fy : 1.0 - w.fy) *
                          (dk ? w.fz : 1.0 - w.fz);
        const size_t idx = 3 * ((size_t(w.k + dk) * ny_ + (w.j + dj)) * nx_ + (w.i + di));
        acc += wt * Vec3{rgb_[idx], rgb_[idx + 1], rgb_[idx + 2]};
      }
    }
  }
  return acc;
}

Aabb GridField::bounds() const {
  return {origin_, origin_ + Vec3{spacing_.x * (nx_ - 1), spacing_.y * (ny_ - 1),
                                  spacing_.z * (nz_ - 1)}};
}

std::shared_ptr<GridField> GridField::sample(const DensityField& field, const Aabb& volume,
                                             int n) {
  if (n < 2) throw InvalidSpec("GridField::sample: need n >= 2");
  const Vec3 ext = volume.extent();
  const Vec3 spacing{ext.x / (n - 1), ext.y / (n - 1), ext.z / (n - 1)};
  std::vector<float> data;
  data.reserve(size_t(n) * n * n);
  std::vector<float> rgb;
  const bool colored = field.has_color();
  if (colored) rgb.reserve(data.capacity() * 3);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const Vec3 p = volume.min + Vec3{spacing.x * i, spacing.y * j, spacing.z * k};
        data.push_back(static_cast<float>(field.density(p)));
        if (colored) {
          const Vec3 c = field.color(p);
          rgb.push_back(static_cast<float>(c.x));
          rgb.push_back(static_cast<float>(c.y));
          rgb.push_back(static_cast<float>(c.z));
        }
      }
    }
  }
  return std::make_shared<GridField>(volume.min, spacing, n, n, n, std::move(data),
                                     std::move(rgb));
}

Vec3 bend_point(const Vec3& x, const BendSpec& spec) {
  const RigidTransform& r = spec.transform;
  if (spec.mode == BendMode::kMove && spec.volume.contains(x)) {
    return r.apply(x);
  }
  // x in R * V_o  <=>  R^-1 x in V_o
  const Vec3 back = r.inverse().apply(x);
  if (spec.volume.contains(back)) return back;
  return x;
}

Aabb BentField::bounds() const {
  Aabb b = inner_->bounds();
  // The moved copy of the edited volume can extend past the source bounds.
  const Aabb& v = spec_.volume;
  for (int c = 0; c < 8; ++c) {
    const Vec3 corner{c & 1 ? v.max.x : v.min.x, c & 2 ? v.max.y : v.min.y,
                      c & 4 ? v.max.z : v.min.z};
    b.extend(spec_.transform.apply(corner));
  }
  return b;
}

}  // namespace figsim
