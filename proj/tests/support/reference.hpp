// Plain-loop reference implementations used as oracles.
#pragma once

#include <cmath>
#include <vector>

#include "essaymrc/encoder.hpp"
#include "essaymrc/heads.hpp"

namespace essaymrc::testing {

using Grid = std::vector<std::vector<double>>;

inline Grid to_grid(const Matrix<double>& m) {
  Grid g(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) g[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = m(r, c);
  return g;
}

inline Grid matmul(const Grid& a, const Grid& b) {
  Grid out(a.size(), std::vector<double>(b[0].size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b[0].size(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < b.size(); ++k) s += a[i][k] * b[k][j];
      out[i][j] = s;
    }
  return out;
}

/// softmax(Q Kᵀ / sqrt(d_k)) V per head, heads concatenated, then W_o and b_o.
inline Grid reference_attention(const Grid& x, const LayerParams<double>& layer, std::size_t heads,
                                std::vector<Grid>* weights = nullptr) {
  const Grid q = matmul(x, to_grid(layer.w_q));
  const Grid k = matmul(x, to_grid(layer.w_k));
  const Grid v = matmul(x, to_grid(layer.w_v));
  const std::size_t tau = x.size();
  const std::size_t d = q[0].size();
  const std::size_t dk = d / heads;
  Grid context(tau, std::vector<double>(d, 0.0));
  if (weights) weights->assign(heads, Grid(tau, std::vector<double>(tau, 0.0)));
  for (std::size_t h = 0; h < heads; ++h) {
    for (std::size_t i = 0; i < tau; ++i) {
      std::vector<double> score(tau);
      double max = -INFINITY;
      for (std::size_t j = 0; j < tau; ++j) {
        double s = 0.0;
        for (std::size_t c = 0; c < dk; ++c) s += q[i][h * dk + c] * k[j][h * dk + c];
        score[j] = s / std::sqrt(static_cast<double>(dk));
        max = std::max(max, score[j]);
      }
      double total = 0.0;
      for (auto& s : score) total += (s = std::exp(s - max));
      for (std::size_t j = 0; j < tau; ++j) {
        const double w = score[j] / total;
        if (weights) (*weights)[h][i][j] = w;
        for (std::size_t c = 0; c < dk; ++c) context[i][h * dk + c] += w * v[j][h * dk + c];
      }
    }
  }
  Grid out = matmul(context, to_grid(layer.w_o));
  for (auto& row : out)
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += layer.b_o(0, static_cast<Index>(c));
  return out;
}

/// max(0, A W_1 + b_1) W_2 + b_2, row by row.
inline Grid reference_ffn(const Grid& a, const LayerParams<double>& layer) {
  Grid pre = matmul(a, to_grid(layer.w_1));
  for (auto& row : pre)
    for (std::size_t c = 0; c < row.size(); ++c) row[c] = std::max(0.0, row[c] + layer.b_1(0, static_cast<Index>(c)));
  Grid out = matmul(pre, to_grid(layer.w_2));
  for (auto& row : out)
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += layer.b_2(0, static_cast<Index>(c));
  return out;
}

/// Relative error max|a-b| / max(max|b|, tiny).
inline double grid_relative_error(const Matrix<double>& a, const Grid& b) {
  double diff = 0.0, scale = 1e-300;
  for (Index r = 0; r < a.rows(); ++r)
    for (Index c = 0; c < a.cols(); ++c) {
      const double ref = b[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      diff = std::max(diff, std::abs(a(r, c) - ref));
      scale = std::max(scale, std::abs(ref));
    }
  return diff / scale;
}

/// O(tau^2) score_has over 1 < k <= l <= tau (1-indexed).
inline double brute_force_score_has(const SpanDistributions& d) {
  double best = -INFINITY;
  for (std::size_t k = 2; k <= d.tau(); ++k)
    for (std::size_t l = k; l <= d.tau(); ++l) best = std::max(best, d.p_start(k) + d.p_end(l));
  return best;
}

}  // namespace essaymrc::testing
