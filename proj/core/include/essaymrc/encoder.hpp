// Miniature bidirectional transformer encoder.
//
// Per layer, with H the previous hidden states (tau × d_model):
//   Q = H·W_q, K = H·W_k, V = H·W_v, split column-wise into heads of width d_k
//   Attention_h = softmax(Q_h·K_hᵀ / sqrt(d_k)) · V_h
//   Att = concat_h(Attention_h) · W_o + b_o
//   A   = LayerNorm(H + Att)                 (A = Att when residual_norm is off)
//   F   = max(0, A·W_1 + b_1) · W_2 + b_2
//   H'  = LayerNorm(A + F)                   (H' = F when residual_norm is off)
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "essaymrc/seqbuild.hpp"
#include "essaymrc/tensor.hpp"

namespace essaymrc {

struct EncoderConfig {
  std::size_t layers = 2;
  std::size_t d_model = 64;
  std::size_t heads = 4;
  std::size_t ffn_inner = 256;
  std::size_t max_len = kDefaultMaxLength;
  std::size_t vocab_size = 0;
  std::uint64_t seed = 0;
  /// Residual connections and layer normalization around both sublayers.
  bool residual_norm = true;
  double init_std = 0.02;
  double norm_eps = 1e-5;

  std::size_t d_k() const { return d_model / heads; }
  /// Throws ConfigError when a count is zero or d_model is not divisible by heads.
  void validate() const;
  bool operator==(const EncoderConfig&) const = default;
};

template <typename T>
struct LayerParams {
  Matrix<T> w_q, w_k, w_v;  // d_model × d_model, head h owns columns [h*d_k, (h+1)*d_k)
  Matrix<T> w_o, b_o;
  Matrix<T> norm1_gain, norm1_bias;
  Matrix<T> w_1, b_1, w_2, b_2;
  Matrix<T> norm2_gain, norm2_bias;
};

template <typename T>
struct EncoderParams {
  EncoderConfig config;
  Matrix<T> token_embedding;     // vocab_size × d_model
  Matrix<T> position_embedding;  // max_len × d_model
  std::vector<LayerParams<T>> layers;
};

template <typename T>
using HiddenStates = Matrix<T>;

/// Visits every tensor of a layer with a stable name. Works for const and mutable params.
template <typename Layer, typename Fn>
void visit_layer(Layer& p, const std::string& prefix, Fn&& fn) {
  fn(prefix + "w_q", p.w_q);
  fn(prefix + "w_k", p.w_k);
  fn(prefix + "w_v", p.w_v);
  fn(prefix + "w_o", p.w_o);
  fn(prefix + "b_o", p.b_o);
  fn(prefix + "norm1_gain", p.norm1_gain);
  fn(prefix + "norm1_bias", p.norm1_bias);
  fn(prefix + "w_1", p.w_1);
  fn(prefix + "b_1", p.b_1);
  fn(prefix + "w_2", p.w_2);
  fn(prefix + "b_2", p.b_2);
  fn(prefix + "norm2_gain", p.norm2_gain);
  fn(prefix + "norm2_bias", p.norm2_bias);
}

template <typename Params, typename Fn>
void visit_encoder(Params& p, Fn&& fn) {
  fn(std::string("encoder.token_embedding"), p.token_embedding);
  fn(std::string("encoder.position_embedding"), p.position_embedding);
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    visit_layer(p.layers[l], "encoder.layer" + std::to_string(l) + ".", fn);
  }
}

/// Seeded normal(0, init_std) weights, zero biases, unit normalization gains.
template <typename T>
EncoderParams<T> init_encoder(const EncoderConfig& config);

/// Same shapes as `like`, all zeros (gradient accumulators).
template <typename T>
EncoderParams<T> zeros_like(const EncoderParams<T>& like);

template <typename T>
struct AttentionTrace {
  Matrix<T> input, q, k, v, context;
  std::vector<Matrix<T>> weights;  // one tau × tau row-stochastic matrix per head
};

template <typename T>
struct NormTrace {
  Matrix<T> normalized;
  ColVector<T> inv_std;
};

template <typename T>
struct LayerTrace {
  AttentionTrace<T> attention;
  NormTrace<T> norm1, norm2;
  Matrix<T> ffn_input, ffn_pre_relu, ffn_hidden;
};

template <typename T>
struct EncoderTrace {
  std::vector<TokenId> ids;
  std::size_t key_len = 0;
  std::vector<LayerTrace<T>> layers;
};

/// Multi-head attention sublayer including the output projection. Keys at
/// positions >= key_len are masked out (padding); pass key_len = rows for none.
template <typename T>
Matrix<T> scaled_attention(const Matrix<T>& input, const LayerParams<T>& layer, const EncoderConfig& config,
                           Index key_len, AttentionTrace<T>* trace = nullptr);

template <typename T>
HiddenStates<T> encoder_layer(const HiddenStates<T>& input, const LayerParams<T>& layer, const EncoderConfig& config,
                              Index key_len, LayerTrace<T>* trace = nullptr);

/// Token + position embedding followed by all layers. Throws ValidationError
/// for a token id outside the vocabulary or a sequence longer than max_len.
template <typename T>
HiddenStates<T> encode_ids(std::span<const TokenId> ids, const EncoderParams<T>& params, Index key_len,
                           EncoderTrace<T>* trace = nullptr);

template <typename T>
HiddenStates<T> encode(const InputSequence& seq, const EncoderParams<T>& params);

/// Pads every sequence to the longest one with [PAD] and masks padded keys;
/// returns each sequence's hidden states with padding rows dropped.
template <typename T>
std::vector<HiddenStates<T>> encode_batch(std::span<const InputSequence> seqs, const EncoderParams<T>& params);

/// Backpropagates d_output through one layer, accumulating into `grad`; returns d_input.
template <typename T>
Matrix<T> layer_backward(const LayerTrace<T>& trace, const LayerParams<T>& layer, const EncoderConfig& config,
                         const Matrix<T>& d_output, LayerParams<T>& grad);

template <typename T>
void encoder_backward(const EncoderTrace<T>& trace, const EncoderParams<T>& params, const Matrix<T>& d_hidden,
                      EncoderParams<T>& grad);

/// Converts between precisions (checkpoints are 32-bit; gradient checks run in 64-bit).
template <typename To, typename From>
EncoderParams<To> cast_params(const EncoderParams<From>& from);

}  // namespace essaymrc
