#include "figsim/geometry/kabsch.hpp"

#include <Eigen/Dense>

#include "figsim/error.hpp"

namespace figsim {
namespace {

Quat quat_from_matrix(const Eigen::Matrix3d& m) {
  // Shepperd's method, branch on the largest diagonal term.
  Quat q;
  const double trace = m.trace();
  if (trace > 0.0) {
    double s = std::sqrt(trace + 1.0) * 2.0;
    q.w = 0.25 * s;
    q.x = (m(2, 1) - m(1, 2)) / s;
    q.y = (m(0, 2) - m(2, 0)) / s;
    q.z = (m(1, 0) - m(0, 1)) / s;
  } else if (m(0, 0) > m(1, 1) && m(0, 0) > m(2, 2)) {
    double s = std::sqrt(1.0 + m(0, 0) - m(1, 1) - m(2, 2)) * 2.0;
    q.w = (m(2, 1) - m(1, 2)) / s;
    q.x = 0.25 * s;
    q.y = (m(0, 1) + m(1, 0)) / s;
    q.z = (m(0, 2) + m(2, 0)) / s;
  } else if (m(1, 1) > m(2, 2)) {
    double s = std::sqrt(1.0 + m(1, 1) - m(0, 0) - m(2, 2)) * 2.0;
    q.w = (m(0, 2) - m(2, 0)) / s;
    q.x = (m(0, 1) + m(1, 0)) / s;
    q.y = 0.25 * s;
    q.z = (m(1, 2) + m(2, 1)) / s;
  } else {
    double s = std::sqrt(1.0 + m(2, 2) - m(0, 0) - m(1, 1)) * 2.0;
    q.w = (m(1, 0) - m(0, 1)) / s;
    q.x = (m(0, 2) + m(2, 0)) / s;
    q.y = (m(1, 2) + m(2, 1)) / s;
    q.z = 0.25 * s;
  }
  return q.normalized();
}

}  // namespace

RigidTransform kabsch_fit(const std::vector<Vec3>& src, const std::vector<Vec3>& dst) {
  if (src.size() != dst.size()) throw DegenerateFit("kabsch_fit: point count mismatch");
  const size_t n = src.size();
  if (n < 3) throw DegenerateFit("kabsch_fit: need at least 3 points");

  Vec3 cs, cd;
  for (size_t i = 0; i < n; ++i) {
    cs += src[i];
    cd += dst[i];
  }
  cs *= 1.0 / static_cast<double>(n);
  cd *= 1.0 / static_cast<double>(n);

  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  for (size_t i = 0; i < n; ++i) {
    const Vec3 a = src[i] - cs;
    const Vec3 b = dst[i] - cd;
    h(0, 0) += a.x * b.x; h(0, 1) += a.x * b.y; h(0, 2) += a.x * b.z;
    h(1, 0) += a.y * b.x; h(1, 1) += a.y * b.y; h(1, 2) += a.y * b.z;
    h(2, 0) += a.z * b.x; h(2, 1) += a.z * b.y; h(2, 2) += a.z * b.z;
  }

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  // Collinear input: at most one non-negligible singular value.
  if (sv(1) <= 1e-12 * std::max(sv(0), 1e-300)) {
    throw DegenerateFit("kabsch_fit: collinear points");
  }

  Eigen::Matrix3d u = svd.matrixU();
  Eigen::Matrix3d v = svd.matrixV();
  Eigen::Matrix3d r = v * u.transpose();
  if (r.determinant() < 0.0) {
    v.col(2) *= -1.0;
    r = v * u.transpose();
  }

  RigidTransform t;
  t.rotation = quat_from_matrix(r);
  t.translation = cd - t.rotation.rotate(cs);
  return t;
}

}  // namespace figsim
