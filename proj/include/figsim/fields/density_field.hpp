#pragma once

#include <memory>
#include <vector>

#include "figsim/geometry/aabb.hpp"
#include "figsim/geometry/transform.hpp"
#include "figsim/geometry/vec3.hpp"

namespace figsim {

//! Evaluatable non-negative density with optional view-independent color.
class DensityField {
 public:
  virtual ~DensityField() = default;
  virtual double density(const Vec3& x) const = 0;
  virtual Vec3 color(const Vec3& x) const { return {1.0, 1.0, 1.0}; }
  virtual bool has_color() const { return false; }
  //! Region outside of which the density is zero.
  virtual Aabb bounds() const = 0;
};

using FieldPtr = std::shared_ptr<const DensityField>;

class SphereField final : public DensityField {
 public:
  SphereField(const Vec3& center, double radius, double density = 1.0,
              const Vec3& rgb = {1, 1, 1});
  double density(const Vec3& x) const override;
  Vec3 color(const Vec3&) const override { return rgb_; }
  bool has_color() const override { return true; }
  Aabb bounds() const override;

 private:
  Vec3 center_;
  double radius_;
  double density_;
  Vec3 rgb_;
};

class BoxField final : public DensityField {
 public:
  BoxField(const Aabb& box, double density = 1.0, const Vec3& rgb = {1, 1, 1});
  double density(const Vec3& x) const override;
  Vec3 color(const Vec3&) const override { return rgb_; }
  bool has_color() const override { return true; }
  Aabb bounds() const override { return box_; }

 private:
  Aabb box_;
  double density_;
  Vec3 rgb_;
};

//! Pointwise max over member fields; color taken from the densest member.
class UnionField final : public DensityField {
 public:
  explicit UnionField(std::vector<FieldPtr> members);
  double density(const Vec3& x) const override;
  Vec3 color(const Vec3& x) const override;
  bool has_color() const override;
  Aabb bounds() const override;

 private:
  std::vector<FieldPtr> members_;
};

//! Trilinearly interpolated grid; zero outside the grid extent.
class GridField final : public DensityField {
 public:
  GridField(const Vec3& origin, const Vec3& spacing, int nx, int ny, int nz,
            std::vector<float> densities, std::vector<float> rgb = {},
            double threshold = 0.5);

  double density(const Vec3& x) const override;
  Vec3 color(const Vec3& x) const override;
  bool has_color() const override { return !rgb_.empty(); }
  Aabb bounds() const override;

  const Vec3& origin() const { return origin_; }
  const Vec3& spacing() const { return spacing_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  double threshold() const { return threshold_; }
  const std::vector<float>& densities() const { return data_; }
  const std::vector<float>& colors() const { return rgb_; }

  //! Sample a field onto a regular grid over `volume`, n points per axis.
  static std::shared_ptr<GridField> sample(const DensityField& field, const Aabb& volume, int n);

 private:
  float at(int i, int j, int k) const { return data_[(size_t(k) * ny_ + j) * nx_ + i]; }

  Vec3 origin_, spacing_;
  int nx_, ny_, nz_;
  std::vector<float> data_;
  std::vector<float> rgb_;  // 3 floats per grid point when present
  double threshold_;
};

//! Convenience entry point matching the sampling contract above.
inline double sample_density(const DensityField& field, const Vec3& x) {
  return field.density(x);
}

}  // namespace figsim
