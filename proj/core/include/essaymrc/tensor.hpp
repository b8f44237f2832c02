#pragma once

#include <Eigen/Core>

namespace essaymrc {

/// Row-major dense matrix; every learnable tensor (including biases, stored 1×n) uses it.
template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename T>
using ColVector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

}  // namespace essaymrc

namespace essaymrc {

/// Numerically stable softmax over each row, restricted to the first `valid`
/// columns; the remaining columns are set to zero.
template <typename T>
void softmax_rows_inplace(Matrix<T>& m, Index valid) {
  for (Index r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    auto head = row.head(valid);
    const T max = head.maxCoeff();
    head = (head.array() - max).exp();
    head /= head.sum();
    if (valid < m.cols()) row.tail(m.cols() - valid).setZero();
  }
}

}  // namespace essaymrc
