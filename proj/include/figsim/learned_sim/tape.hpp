#pragma once

#include <functional>
#include <vector>

#include "figsim/learned_sim/tensor.hpp"

namespace figsim {

//! Reverse-mode tape. Values are computed eagerly; backward() replays the
//! recorded closures in reverse. Leaves reference external tensors and
//! accumulate their gradients on the tape.
class Tape {
 public:
  //! Leaf referencing external storage; `external` must outlive the tape.
  int leaf(const Tensor& external);
  //! Leaf owning a copy of `value` (for per-pass inputs).
  int constant(Tensor value);

  const Tensor& value(int id) const;
  const Tensor& grad(int id) const;

  int matmul(int a, int b);
  //! Broadcast a 1 x n bias over every row.
  int add_bias(int x, int bias);
  int add(int a, int b);
  int relu(int x);
  //! Per-row layer normalization with learnable 1 x n scale and shift.
  int layernorm(int x, int scale, int shift);
  int concat_cols(const std::vector<int>& parts);
  //! Y[i] = X[index[i]].
  int gather_rows(int x, std::vector<int> index);
  //! Y has `out_rows` rows; Y[index[i]] += X[i].
  int scatter_add_rows(int x, std::vector<int> index, int out_rows);
  //! y = x (*) col_scale + col_shift, both 1 x n constants (no gradient).
  int affine_cols(int x, Tensor col_scale, Tensor col_shift);
  //! y = x + c for a constant tensor.
  int add_constant(int x, Tensor c);
  //! Weighted mean over all entries of (pred - target)^2; row weights in
  //! `row_weight`, normalized by (sum of weights) * cols. Returns a 1x1 node.
  int weighted_mse(int pred, Tensor target, std::vector<double> row_weight);

  //! Seed d(output)/d(output) = 1 and run all closures in reverse.
  //! `output` must be 1x1.
  void backward(int output);

  static constexpr double kLayerNormEps = 1e-8;

 private:
  struct Node {
    Tensor value;                 // owned value (unused for external leaves)
    const Tensor* external = nullptr;
    Tensor grad;
    std::function<void()> back;  // null for leaves
  };

  const Tensor& val(int id) const {
    const Node& n = nodes_[id];
    return n.external ? *n.external : n.value;
  }
  int push(Tensor value, std::function<void()> back);

  std::vector<Node> nodes_;
};

}  // namespace figsim
