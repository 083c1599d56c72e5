#pragma once

#include "figsim/fields/density_field.hpp"
#include "figsim/geometry/aabb.hpp"
#include "figsim/geometry/transform.hpp"

namespace figsim {

enum class BendMode { kMove, kDuplicate };

//! Ray-bending edit: a volume and the rigid transform applied to it.
struct BendSpec {
  BendMode mode = BendMode::kMove;
  Aabb volume;               // V_o
  RigidTransform transform;  // R_t
};

//! Remap a sample point according to the edit. Branches are tested in order;
//! the first matching region wins.
//!   move:      x in V_o -> R x;  x in R V_o -> R^-1 x;  else x
//!   duplicate: x in R V_o -> R^-1 x;  else x
Vec3 bend_point(const Vec3& x, const BendSpec& spec);

//! Field with density sigma_hat(x) = sigma(bend_point(x, spec)).
class BentField final : public DensityField {
 public:
  BentField(FieldPtr inner, const BendSpec& spec) : inner_(std::move(inner)), spec_(spec) {}
  double density(const Vec3& x) const override { return inner_->density(bend_point(x, spec_)); }
  Vec3 color(const Vec3& x) const override { return inner_->color(bend_point(x, spec_)); }
  bool has_color() const override { return inner_->has_color(); }
  Aabb bounds() const override;

 private:
  FieldPtr inner_;
  BendSpec spec_;
};

inline FieldPtr bent_field(FieldPtr field, const BendSpec& spec) {
  return std::make_shared<BentField>(std::move(field), spec);
}

}  // namespace figsim
