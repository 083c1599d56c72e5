#include <cmath>

#include "figsim/error.hpp"
#include "figsim/learned_sim/model.hpp"

namespace figsim {

RunningStat::RunningStat(int width)
    : width_(width), sum_(width, 0.0), sum_sq_(width, 0.0) {}

void RunningStat::add(const double* row) {
  for (int c = 0; c < width_; ++c) {
    sum_[c] += row[c];
    sum_sq_[c] += row[c] * row[c];
  }
  ++count_;
}

void RunningStat::add_rows(const std::vector<double>& flat) {
  if (flat.size() % width_ != 0) throw LengthMismatch("RunningStat: flat size not a multiple");
  for (size_t i = 0; i < flat.size(); i += width_) add(flat.data() + i);
}

Tensor RunningStat::mean() const {
  Tensor m(1, width_);
  if (count_ == 0) return m;
  for (int c = 0; c < width_; ++c) m.at(0, c) = sum_[c] / double(count_);
  return m;
}

Tensor RunningStat::std_dev() const {
  Tensor s(1, width_);
  for (int c = 0; c < width_; ++c) s.at(0, c) = 1.0;
  if (count_ == 0) return s;
  for (int c = 0; c < width_; ++c) {
    const double mu = sum_[c] / double(count_);
    const double var = sum_sq_[c] / double(count_) - mu * mu;
    s.at(0, c) = std::max(std::sqrt(std::max(var, 0.0)), kStdFloor);
  }
  return s;
}

Tensor Moments::normalize(const std::vector<double>& flat) const {
  const int width = mean.cols;
  if (flat.size() % width != 0) throw LengthMismatch("Moments::normalize: width mismatch");
  Tensor out(static_cast<int>(flat.size()) / width, width);
  for (int r = 0; r < out.rows; ++r) {
    for (int c = 0; c < width; ++c) {
      out.at(r, c) = (flat[size_t(r) * width + c] - mean.at(0, c)) / std_dev.at(0, c);
    }
  }
  return out;
}

Moments identity_moments(int width) {
  Moments m;
  m.mean = Tensor(1, width);
  m.std_dev = Tensor(1, width);
  for (int c = 0; c < width; ++c) m.std_dev.at(0, c) = 1.0;
  return m;
}

Moments moments_of(const RunningStat& stat) { return {stat.mean(), stat.std_dev()}; }

NormalizerSet identity_normalizers() {
  NormalizerSet n;
  n.node = identity_moments(kNodeFeatureWidth);
  n.node_node = identity_moments(kNodeNodeFeatureWidth);
  n.vert_to_obj = identity_moments(kObjectNodeFeatureWidth);
  n.obj_to_vert = identity_moments(kObjectNodeFeatureWidth);
  n.face_face = identity_moments(kFaceFaceFeatureWidth);
  n.accel = identity_moments(3);
  return n;
}

}  // namespace figsim
