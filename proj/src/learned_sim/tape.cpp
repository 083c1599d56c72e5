#include "figsim/learned_sim/tape.hpp"

#include <cmath>
#include <memory>

#include "figsim/error.hpp"

namespace figsim {

int Tape::leaf(const Tensor& external) {
  Node n;
  n.external = &external;
  n.grad = Tensor(external.rows, external.cols);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

int Tape::constant(Tensor value) {
  Node n;
  n.grad = Tensor(value.rows, value.cols);
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

const Tensor& Tape::value(int id) const { return val(id); }
const Tensor& Tape::grad(int id) const { return nodes_[id].grad; }

int Tape::push(Tensor value, std::function<void()> back) {
  Node n;
  n.grad = Tensor(value.rows, value.cols);
  n.value = std::move(value);
  n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

int Tape::matmul(int a, int b) {
  Tensor c;
  figsim::matmul(val(a), false, val(b), false, c, false);
  const int id = push(std::move(c), nullptr);
  nodes_[id].back = [this, a, b, id] {
    figsim::matmul(nodes_[id].grad, false, val(b), true, nodes_[a].grad, true);
    figsim::matmul(val(a), true, nodes_[id].grad, false, nodes_[b].grad, true);
  };
  return id;
}

int Tape::add_bias(int x, int bias) {
  const Tensor& xv = val(x);
  const Tensor& bv = val(bias);
  if (bv.rows != 1 || bv.cols != xv.cols) throw LengthMismatch("add_bias: bias shape");
  Tensor y = xv;
  for (int r = 0; r < y.rows; ++r) {
    for (int c = 0; c < y.cols; ++c) y.at(r, c) += bv.at(0, c);
  }
  const int id = push(std::move(y), nullptr);
  nodes_[id].back = [this, x, bias, id] {
    const Tensor& g = nodes_[id].grad;
    Tensor& gx = nodes_[x].grad;
    Tensor& gb = nodes_[bias].grad;
    for (size_t i = 0; i < g.size(); ++i) gx.v[i] += g.v[i];
    for (int r = 0; r < g.rows; ++r) {
      for (int c = 0; c < g.cols; ++c) gb.at(0, c) += g.at(r, c);
    }
  };
  return id;
}

int Tape::add(int a, int b) {
  const Tensor& av = val(a);
  const Tensor& bv = val(b);
  if (av.rows != bv.rows || av.cols != bv.cols) throw LengthMismatch("add: shape mismatch");
  Tensor y = av;
  for (size_t i = 0; i < y.size(); ++i) y.v[i] += bv.v[i];
  const int id = push(std::move(y), nullptr);
  nodes_[id].back = [this, a, b, id] {
    const Tensor& g = nodes_[id].grad;
    for (size_t i = 0; i < g.size(); ++i) {
      nodes_[a].grad.v[i] += g.v[i];
      nodes_[b].grad.v[i] += g.v[i];
    }
  };
  return id;
}

int Tape::relu(int x) {
  Tensor y = val(x);
  for (double& v : y.v) v = v > 0.0 ? v : 0.0;
  const int id = push(std::move(y), nullptr);
  nodes_[id].back = [this, x, id] {
    const Tensor& g = nodes_[id].grad;
    const Tensor& xv = val(x);
    Tensor& gx = nodes_[x].grad;
    for (size_t i = 0; i < g.size(); ++i) {
      if (xv.v[i] > 0.0) gx.v[i] += g.v[i];
    }
  };
  return id;
}

int Tape::layernorm(int x, int scale, int shift) {
  const Tensor& xv = val(x);
  const Tensor& sv = val(scale);
  const Tensor& tv = val(shift);
  if (sv.rows != 1 || sv.cols != xv.cols || tv.rows != 1 || tv.cols != xv.cols) {
    throw LengthMismatch("layernorm: scale/shift shape");
  }
  const int n = xv.cols;
  Tensor y(xv.rows, n);
  // cache per-row mean and inverse std for the backward pass
  auto stats = std::make_shared<std::vector<double>>(size_t(xv.rows) * 2);
  for (int r = 0; r < xv.rows; ++r) {
    double mean = 0.0;
    for (int c = 0; c < n; ++c) mean += xv.at(r, c);
    mean /= n;
    double var = 0.0;
    for (int c = 0; c < n; ++c) {
      const double d = xv.at(r, c) - mean;
      var += d * d;
    }
    var /= n;
    const double inv_std = 1.0 / std::sqrt(var + kLayerNormEps);
    (*stats)[2 * r] = mean;
    (*stats)[2 * r + 1] = inv_std;
    for (int c = 0; c < n; ++c) {
      y.at(r, c) = sv.at(0, c) * (xv.at(r, c) - mean) * inv_std + tv.at(0, c);
    }
  }
  const int id = push(std::move(y), nullptr);
  nodes_[id].back = [this, x, scale, shift, id, stats, n] {
    const Tensor& g = nodes_[id].grad;
    const Tensor& xv = val(x);
    const Tensor& sv = val(scale);
    Tensor& gx = nodes_[x].grad;
    Tensor& gs = nodes_[scale].grad;
    Tensor& gt = nodes_[shift].grad;
    for (int r = 0; r < xv.rows; ++r) {
      const double mean = (*stats)[2 * r];
      const double inv_std = (*stats)[2 * r + 1];
      double sum_gh = 0.0;   // sum of (dL/dy * scale)
      double sum_ghx = 0.0;  // sum of (dL/dy * scale * xhat)
      for (int c = 0; c < n; ++c) {
        const double xhat = (xv.at(r, c) - mean) * inv_std;
        const double gh = g.at(r, c) * sv.at(0, c);
        sum_gh += gh;
        sum_ghx += gh * xhat;
        gs.at(0, c) += g.at(r, c) * xhat;
        gt.at(0, c) += g.at(r, c);
      }
      for (int c = 0; c < n; ++c) {
        const double xhat = (xv.at(r, c) - mean) * inv_std;
        const double gh = g.at(r, c) * sv.at(0, c);
        gx.at(r, c) += inv_std * (gh - (sum_gh + xhat * sum_ghx) / n);
      }
    }
  };
  return id;
}

int Tape::concat_cols(const std::vector<int>& parts) {
  if (parts.empty()) throw LengthMismatch("concat_cols: no parts");
  const int rows = val(parts[0]).rows;
  int cols = 0;
  for (const int p : parts) {
    if (val(p).rows != rows) throw LengthMismatch("concat_cols: row mismatch");
    cols += val(p).cols;
  }
  Tensor y(rows, cols);
  int offset = 0;
  for (const int p : parts) {
    const Tensor& pv = val(p);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < pv.cols; ++c) y.at(r, offset + c) = pv.at(r, c);
    }
    offset += pv.cols;
  }
  const int id = push(std::move(y), nullptr);
  nodes_[id].back = [this, parts, id] {
    const Tensor& g = nodes_[id].grad;
    int offset = 0;
    for (const int p : parts) {
      Tensor& gp = nodes_[p].grad;
      for (int r = 0; r < gp.rows; ++r) {
        for (int c = 0; c < gp.cols; ++c) gp.at(r, c) += g.at(r, offset + c);
      }
      offset += gp.cols;
    }
  };
  return id;
}

int Tape::gather_rows(int x, std::vector<int> index) {
  const Tensor& xv = val(x);
  Tensor y(static_cast<int>(index.size()), xv.cols);
  for (size_t i = 0; i < index.size(); ++i) {
    for (int c = 0; c < xv.cols; ++c) y.at(static_cast<int>(i), c) = xv.at(index[i], c);
  }
  const int id = push(std::move(y), nullptr);
  auto idx = std::make_shared<std::vector<int>>(std::move(index));
  nodes_[id].back = [this, x, id, idx] {
    const Tensor& g = nodes_[id].grad;
    Tensor& gx = nodes_[x].grad;
    for (size_t i = 0; i < idx->size(); ++i) {
      for (int c = 0; c < g.cols; ++c) gx.at((*idx)[i], c) += g.at(static_cast<int>(i), c);
    }
  };
  return id;
}

int Tape::scatter_add_rows(int x, std::vector<int> index, int out_rows) {
  const Tensor& xv = val(x);
  if (static_cast<int>(index.size()) != xv.rows) {
    throw LengthMismatch("scatter_add_rows: index length");
  }
  Tensor y(out_rows, xv.cols);
  for (size_t i = 0; i < index.size(); ++i) {
    for (int c = 0; c < xv.cols; ++c) y.at(index[i], c) += xv.at(static_cast<int>(i), c);
  }
  const int id = push(std::move(y), nullptr);
  auto idx = std::make_shared<std::vector<int>>(std::move(index));
  nodes_[id].back = [this, x, id, idx] {
    const Tensor& g = nodes_[id].grad;
    Tensor& gx = nodes_[x].grad;
    for (size_t i = 0; i < idx->size(); ++i) {
      for (int c = 0; c < g.cols; ++c) gx.at(static_cast<int>(i), c) += g.at((*idx)[i], c);
    }
  };
  return id;
}

int Tape::affine_cols(int x, Tensor col_scale, Tensor col_shift) {
  const Tensor& xv = val(x);
  if (col_scale.cols != xv.cols || col_shift.cols != xv.cols) {
    throw LengthMismatch("affine_cols: shape mismatch");
  }
  Tensor y = xv;
  for (int r = 0; r < y.rows; ++r) {
    for (int c = 0; c < y.cols; ++c) {
      y.at(r, c) = y.at(r, c) * col_scale.at(0, c) + col_shift.at(0, c);
    }
  }
  const int id = push(std::move(y), nullptr);
  auto scale = std::make_shared<Tensor>(std::move(col_scale));
  nodes_[id].back = [this, x, id, scale] {
    const Tensor& g = nodes_[id].grad;
    Tensor& gx = nodes_[x].grad;
    for (int r = 0; r < g.rows; ++r) {
      for (int c = 0; c < g.cols; ++c) gx.at(r, c) += g.at(r, c) * scale->at(0, c);
    }
  };
  return id;
}

int Tape::add_constant(int x, Tensor c) {
  const Tensor& xv = val(x);
  if (c.rows != xv.rows || c.cols != xv.cols) throw LengthMismatch("add_constant: shape");
  Tensor y = xv;
  for (size_t i = 0; i < y.size(); ++i) y.v[i] += c.v[i];
  const int id = push(std::move(y), nullptr);
  nodes_[id].back = [this, x, id] {
    const Tensor& g = nodes_[id].grad;
    Tensor& gx = nodes_[x].grad;
    for (size_t i = 0; i < g.size(); ++i) gx.v[i] += g.v[i];
  };
  return id;
}

int Tape::weighted_mse(int pred, Tensor target, std::vector<double> row_weight) {
  const Tensor& pv = val(pred);
  if (target.rows != pv.rows || target.cols != pv.cols) {
    throw LengthMismatch("weighted_mse: target shape");
  }
  if (static_cast<int>(row_weight.size()) != pv.rows) {
    throw LengthMismatch("weighted_mse: weight length");
  }
  double wsum = 0.0;
  for (const double w : row_weight) wsum += w;
  const double norm = wsum > 0.0 ? 1.0 / (wsum * pv.cols) : 0.0;
  double loss = 0.0;
  for (int r = 0; r < pv.rows; ++r) {
    for (int c = 0; c < pv.cols; ++c) {
      const double d = pv.at(r, c) - target.at(r, c);
      loss += row_weight[r] * d * d;
    }
  }
  Tensor y(1, 1);
  y.at(0, 0) = loss * norm;
  const int id = push(std::move(y), nullptr);
  auto tgt = std::make_shared<Tensor>(std::move(target));
  auto w = std::make_shared<std::vector<double>>(std::move(row_weight));
  nodes_[id].back = [this, pred, id, tgt, w, norm] {
    const double g = nodes_[id].grad.at(0, 0);
    const Tensor& pv = val(pred);
    Tensor& gp = nodes_[pred].grad;
    for (int r = 0; r < pv.rows; ++r) {
      for (int c = 0; c < pv.cols; ++c) {
        gp.at(r, c) += g * 2.0 * norm * (*w)[r] * (pv.at(r, c) - tgt->at(r, c));
      }
    }
  };
  return id;
}

void Tape::backward(int output) {
  if (val(output).rows != 1 || val(output).cols != 1) {
    throw LengthMismatch("backward: output must be scalar");
  }
  nodes_[output].grad.at(0, 0) = 1.0;
  for (int id = output; id >= 0; --id) {
    if (nodes_[id].back) nodes_[id].back();
  }
}

}  // namespace figsim
