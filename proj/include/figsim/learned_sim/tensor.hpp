#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace figsim {

//! Dense row-major float64 matrix.
struct Tensor {
  int rows = 0;
  int cols = 0;
  std::vector<double> v;

  Tensor() = default;
  Tensor(int r, int c) : rows(r), cols(c), v(size_t(r) * c, 0.0) {}

  double& at(int r, int c) { return v[size_t(r) * cols + c]; }
  double at(int r, int c) const { return v[size_t(r) * cols + c]; }
  size_t size() const { return v.size(); }

  bool is_finite() const {
    for (const double x : v) {
      if (!std::isfinite(x)) return false;
    }
    return true;
  }
};

//! C = A * B (or += when accumulate), optionally transposing either input.
void matmul(const Tensor& a, bool transpose_a, const Tensor& b, bool transpose_b, Tensor& c,
            bool accumulate);

}  // namespace figsim
