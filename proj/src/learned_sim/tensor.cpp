#include "figsim/learned_sim/tensor.hpp"

#include <cblas.h>

#include "figsim/error.hpp"

namespace figsim {

void matmul(const Tensor& a, bool transpose_a, const Tensor& b, bool transpose_b, Tensor& c,
            bool accumulate) {
  const int m = transpose_a ? a.cols : a.rows;
  const int k = transpose_a ? a.rows : a.cols;
  const int kb = transpose_b ? b.cols : b.rows;
  const int n = transpose_b ? b.rows : b.cols;
  if (k != kb) throw LengthMismatch("matmul: inner dimensions disagree");
  if (!accumulate) {
    c.rows = m;
    c.cols = n;
    c.v.assign(size_t(m) * n, 0.0);
  } else if (c.rows != m || c.cols != n) {
    throw LengthMismatch("matmul: accumulate target has wrong shape");
  }
  if (m == 0 || n == 0 || k == 0) return;
  cblas_dgemm(CblasRowMajor, transpose_a ? CblasTrans : CblasNoTrans,
              transpose_b ? CblasTrans : CblasNoTrans, m, n, k, 1.0, a.v.data(), a.cols,
              b.v.data(), b.cols, accumulate ? 1.0 : 0.0, c.v.data(), c.cols);
}

}  // namespace figsim
