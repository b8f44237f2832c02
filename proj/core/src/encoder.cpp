#include "essaymrc/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "essaymrc/errors.hpp"

namespace essaymrc {

void EncoderConfig::validate() const {
  if (layers == 0 || d_model == 0 || heads == 0 || ffn_inner == 0 || max_len == 0 || vocab_size == 0) {
    throw ConfigError("encoder config counts must be positive");
  }
  if (d_model % heads != 0) throw ConfigError("d_model must be divisible by heads");
  if (!(init_std > 0.0) || !(norm_eps > 0.0)) throw ConfigError("init_std and norm_eps must be positive");
}

namespace {

template <typename T>
Matrix<T> normal_matrix(Index rows, Index cols, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  Matrix<T> m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<T>(dist(rng));
  return m;
}

template <typename T>
Matrix<T> constant(Index rows, Index cols, T value) {
  return Matrix<T>::Constant(rows, cols, value);
}

template <typename T>
Matrix<T> layer_norm(const Matrix<T>& z, const Matrix<T>& gain, const Matrix<T>& bias, double eps,
                     NormTrace<T>* trace) {
  const Index cols = z.cols();
  ColVector<T> mean = z.rowwise().mean();
  Matrix<T> centered = z.colwise() - mean;
  ColVector<T> var = centered.array().square().rowwise().sum() / static_cast<T>(cols);
  ColVector<T> inv_std = (var.array() + static_cast<T>(eps)).rsqrt();
  Matrix<T> normalized = centered.array().colwise() * inv_std.array();
  Matrix<T> out = (normalized.array().rowwise() * gain.row(0).array()).rowwise() + bias.row(0).array();
  if (trace) {
    trace->normalized = std::move(normalized);
    trace->inv_std = std::move(inv_std);
  }
  return out;
}

// Returns d_z given d_out, accumulating the gain/bias gradients.
template <typename T>
Matrix<T> layer_norm_backward(const NormTrace<T>& trace, const Matrix<T>& gain, const Matrix<T>& d_out,
                              Matrix<T>& d_gain, Matrix<T>& d_bias) {
  const auto& xhat = trace.normalized;
  d_gain.row(0) += (d_out.array() * xhat.array()).colwise().sum().matrix();
  d_bias.row(0) += d_out.colwise().sum();
  Matrix<T> dxhat = d_out.array().rowwise() * gain.row(0).array();
  const T inv_cols = T(1) / static_cast<T>(xhat.cols());
  ColVector<T> mean_d = dxhat.rowwise().sum() * inv_cols;
  ColVector<T> mean_dx = (dxhat.array() * xhat.array()).rowwise().sum().matrix() * inv_cols;
  Matrix<T> dz = dxhat.colwise() - mean_d;
  dz -= (xhat.array().colwise() * mean_dx.array()).matrix();
  dz = dz.array().colwise() * trace.inv_std.array();
  return dz;
}

template <typename T>
void add_row_bias(Matrix<T>& m, const Matrix<T>& bias) {
  m.rowwise() += bias.row(0);
}

}  // namespace

template <typename T>
EncoderParams<T> init_encoder(const EncoderConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  const auto d = static_cast<Index>(config.d_model);
  const auto f = static_cast<Index>(config.ffn_inner);
  const double s = config.init_std;

  EncoderParams<T> p;
  p.config = config;
  p.token_embedding = normal_matrix<T>(static_cast<Index>(config.vocab_size), d, s, rng);
  p.position_embedding = normal_matrix<T>(static_cast<Index>(config.max_len), d, s, rng);
  p.layers.resize(config.layers);
  for (auto& l : p.layers) {
    l.w_q = normal_matrix<T>(d, d, s, rng);
    l.w_k = normal_matrix<T>(d, d, s, rng);
    l.w_v = normal_matrix<T>(d, d, s, rng);
    l.w_o = normal_matrix<T>(d, d, s, rng);
    l.b_o = constant<T>(1, d, 0);
    l.norm1_gain = constant<T>(1, d, 1);
    l.norm1_bias = constant<T>(1, d, 0);
    l.w_1 = normal_matrix<T>(d, f, s, rng);
    l.b_1 = constant<T>(1, f, 0);
    l.w_2 = normal_matrix<T>(f, d, s, rng);
    l.b_2 = constant<T>(1, d, 0);
    l.norm2_gain = constant<T>(1, d, 1);
    l.norm2_bias = constant<T>(1, d, 0);
  }
  return p;
}

template <typename T>
EncoderParams<T> zeros_like(const EncoderParams<T>& like) {
  EncoderParams<T> z = like;
  visit_encoder(z, [](const std::string&, Matrix<T>& m) { m.setZero(); });
  return z;
}

template <typename T>
Matrix<T> scaled_attention(const Matrix<T>& input, const LayerParams<T>& layer, const EncoderConfig& config,
                           Index key_len, AttentionTrace<T>* trace) {
  const auto dk = static_cast<Index>(config.d_k());
  const T scale = T(1) / std::sqrt(static_cast<T>(dk));
  Matrix<T> q = input * layer.w_q;
  Matrix<T> k = input * layer.w_k;
  Matrix<T> v = input * layer.w_v;
  Matrix<T> context(input.rows(), input.cols());
  if (trace) trace->weights.resize(config.heads);

  for (Index h = 0; h < static_cast<Index>(config.heads); ++h) {
    Matrix<T> w = (q.middleCols(h * dk, dk) * k.middleCols(h * dk, dk).transpose()) * scale;
    softmax_rows_inplace(w, key_len);
    context.middleCols(h * dk, dk).noalias() = w * v.middleCols(h * dk, dk);
    if (trace) trace->weights[h] = std::move(w);
  }
  Matrix<T> out = context * layer.w_o;
  add_row_bias(out, layer.b_o);
  if (trace) {
    trace->input = input;
    trace->q = std::move(q);
    trace->k = std::move(k);
    trace->v = std::move(v);
    trace->context = std::move(context);
  }
  return out;
}

template <typename T>
HiddenStates<T> encoder_layer(const HiddenStates<T>& input, const LayerParams<T>& layer, const EncoderConfig& config,
                              Index key_len, LayerTrace<T>* trace) {
  Matrix<T> att = scaled_attention(input, layer, config, key_len, trace ? &trace->attention : nullptr);
  Matrix<T> a = config.residual_norm
                    ? layer_norm<T>(input + att, layer.norm1_gain, layer.norm1_bias, config.norm_eps,
                                    trace ? &trace->norm1 : nullptr)
                    : std::move(att);
  Matrix<T> pre = a * layer.w_1;
  add_row_bias(pre, layer.b_1);
  Matrix<T> hidden = pre.cwiseMax(T(0));
  Matrix<T> ffn = hidden * layer.w_2;
  add_row_bias(ffn, layer.b_2);
  Matrix<T> out = config.residual_norm
                      ? layer_norm<T>(a + ffn, layer.norm2_gain, layer.norm2_bias, config.norm_eps,
                                      trace ? &trace->norm2 : nullptr)
                      : std::move(ffn);
  if (trace) {
    trace->ffn_input = std::move(a);
    trace->ffn_pre_relu = std::move(pre);
    trace->ffn_hidden = std::move(hidden);
  }
  return out;
}

template <typename T>
HiddenStates<T> encode_ids(std::span<const TokenId> ids, const EncoderParams<T>& params, Index key_len,
                           EncoderTrace<T>* trace) {
  const auto& config = params.config;
  if (ids.empty()) throw ValidationError("cannot encode an empty sequence");
  if (ids.size() > config.max_len) {
    throw ValidationError("sequence length " + std::to_string(ids.size()) + " exceeds max_len " +
                          std::to_string(config.max_len));
  }
  const auto rows = static_cast<Index>(ids.size());
  Matrix<T> h(rows, static_cast<Index>(config.d_model));
  for (Index u = 0; u < rows; ++u) {
    const auto id = ids[static_cast<std::size_t>(u)];
    if (id < 0 || static_cast<std::size_t>(id) >= config.vocab_size) {
      throw ValidationError("token id " + std::to_string(id) + " outside vocabulary of size " +
                            std::to_string(config.vocab_size));
    }
    h.row(u) = params.token_embedding.row(id) + params.position_embedding.row(u);
  }
  if (trace) {
    trace->ids.assign(ids.begin(), ids.end());
    trace->key_len = static_cast<std::size_t>(key_len);
    trace->layers.resize(params.layers.size());
  }
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    h = encoder_layer<T>(h, params.layers[l], config, key_len, trace ? &trace->layers[l] : nullptr);
  }
  return h;
}

template <typename T>
HiddenStates<T> encode(const InputSequence& seq, const EncoderParams<T>& params) {
  const auto ids = seq.ids();
  return encode_ids<T>(ids, params, static_cast<Index>(ids.size()));
}

template <typename T>
std::vector<HiddenStates<T>> encode_batch(std::span<const InputSequence> seqs, const EncoderParams<T>& params) {
  std::size_t longest = 0;
  for (const auto& s : seqs) longest = std::max(longest, s.tokens.size());
  std::vector<HiddenStates<T>> out;
  out.reserve(seqs.size());
  for (const auto& s : seqs) {
    auto ids = s.ids();
    const auto valid = static_cast<Index>(ids.size());
    ids.resize(longest, Vocabulary::kPad);
    HiddenStates<T> h = encode_ids<T>(ids, params, valid);
    out.emplace_back(h.topRows(valid));
  }
  return out;
}

template <typename T>
Matrix<T> layer_backward(const LayerTrace<T>& trace, const LayerParams<T>& layer, const EncoderConfig& config,
                         const Matrix<T>& d_output, LayerParams<T>& grad) {
  // Feed-forward sublayer.
  Matrix<T> d_ffn;
  Matrix<T> d_a;
  if (config.residual_norm) {
    d_ffn = layer_norm_backward(trace.norm2, layer.norm2_gain, d_output, grad.norm2_gain, grad.norm2_bias);
    d_a = d_ffn;
  } else {
    d_ffn = d_output;
    d_a = Matrix<T>::Zero(d_output.rows(), d_output.cols());
  }
  grad.w_2.noalias() += trace.ffn_hidden.transpose() * d_ffn;
  grad.b_2.row(0) += d_ffn.colwise().sum();
  Matrix<T> d_pre = d_ffn * layer.w_2.transpose();
  d_pre = (trace.ffn_pre_relu.array() > T(0)).select(d_pre, T(0));
  grad.w_1.noalias() += trace.ffn_input.transpose() * d_pre;
  grad.b_1.row(0) += d_pre.colwise().sum();
  d_a.noalias() += d_pre * layer.w_1.transpose();

  // Attention sublayer.
  Matrix<T> d_att;
  Matrix<T> d_input;
  if (config.residual_norm) {
    d_att = layer_norm_backward(trace.norm1, layer.norm1_gain, d_a, grad.norm1_gain, grad.norm1_bias);
    d_input = d_att;
  } else {
    d_att = std::move(d_a);
    d_input = Matrix<T>::Zero(d_output.rows(), d_output.cols());
  }
  const auto& at = trace.attention;
  grad.w_o.noalias() += at.context.transpose() * d_att;
  grad.b_o.row(0) += d_att.colwise().sum();
  Matrix<T> d_context = d_att * layer.w_o.transpose();

  const auto dk = static_cast<Index>(config.d_k());
  const T scale = T(1) / std::sqrt(static_cast<T>(dk));
  Matrix<T> d_q(at.q.rows(), at.q.cols());
  Matrix<T> d_k(at.k.rows(), at.k.cols());
  Matrix<T> d_v(at.v.rows(), at.v.cols());
  for (Index h = 0; h < static_cast<Index>(config.heads); ++h) {
    const auto& w = at.weights[static_cast<std::size_t>(h)];
    const auto dc = d_context.middleCols(h * dk, dk);
    Matrix<T> d_w = dc * at.v.middleCols(h * dk, dk).transpose();
    d_v.middleCols(h * dk, dk).noalias() = w.transpose() * dc;
    ColVector<T> dot = (d_w.array() * w.array()).rowwise().sum();
    Matrix<T> d_scores = (w.array() * (d_w.colwise() - dot).array()).matrix() * scale;
    d_q.middleCols(h * dk, dk).noalias() = d_scores * at.k.middleCols(h * dk, dk);
    d_k.middleCols(h * dk, dk).noalias() = d_scores.transpose() * at.q.middleCols(h * dk, dk);
  }
  grad.w_q.noalias() += at.input.transpose() * d_q;
  grad.w_k.noalias() += at.input.transpose() * d_k;
  grad.w_v.noalias() += at.input.transpose() * d_v;
  d_input.noalias() += d_q * layer.w_q.transpose();
  d_input.noalias() += d_k * layer.w_k.transpose();
  d_input.noalias() += d_v * layer.w_v.transpose();
  return d_input;
}

template <typename T>
void encoder_backward(const EncoderTrace<T>& trace, const EncoderParams<T>& params, const Matrix<T>& d_hidden,
                      EncoderParams<T>& grad) {
  Matrix<T> d = d_hidden;
  for (std::size_t l = params.layers.size(); l-- > 0;) {
    d = layer_backward<T>(trace.layers[l], params.layers[l], params.config, d, grad.layers[l]);
  }
  for (Index u = 0; u < d.rows(); ++u) {
    grad.token_embedding.row(trace.ids[static_cast<std::size_t>(u)]) += d.row(u);
    grad.position_embedding.row(u) += d.row(u);
  }
}

template <typename To, typename From>
EncoderParams<To> cast_params(const EncoderParams<From>& from) {
  EncoderParams<To> to;
  to.config = from.config;
  to.token_embedding = from.token_embedding.template cast<To>();
  to.position_embedding = from.position_embedding.template cast<To>();
  to.layers.resize(from.layers.size());
  for (std::size_t l = 0; l < from.layers.size(); ++l) {
    std::vector<const Matrix<From>*> src;
    visit_layer(from.layers[l], "", [&](const std::string&, const Matrix<From>& m) { src.push_back(&m); });
    std::size_t i = 0;
    visit_layer(to.layers[l], "", [&](const std::string&, Matrix<To>& m) { m = src[i++]->template cast<To>(); });
  }
  return to;
}

#define ESSAYMRC_INSTANTIATE_ENCODER(T)                                                                     \
  template EncoderParams<T> init_encoder<T>(const EncoderConfig&);                                          \
  template EncoderParams<T> zeros_like<T>(const EncoderParams<T>&);                                         \
  template Matrix<T> scaled_attention<T>(const Matrix<T>&, const LayerParams<T>&, const EncoderConfig&,     \
                                         Index, AttentionTrace<T>*);                                        \
  template HiddenStates<T> encoder_layer<T>(const HiddenStates<T>&, const LayerParams<T>&,                  \
                                            const EncoderConfig&, Index, LayerTrace<T>*);                   \
  template HiddenStates<T> encode_ids<T>(std::span<const TokenId>, const EncoderParams<T>&, Index,          \
                                         EncoderTrace<T>*);                                                 \
  template HiddenStates<T> encode<T>(const InputSequence&, const EncoderParams<T>&);                        \
  template std::vector<HiddenStates<T>> encode_batch<T>(std::span<const InputSequence>,                     \
                                                        const EncoderParams<T>&);                           \
  template Matrix<T> layer_backward<T>(const LayerTrace<T>&, const LayerParams<T>&, const EncoderConfig&,   \
                                       const Matrix<T>&, LayerParams<T>&);                                  \
  template void encoder_backward<T>(const EncoderTrace<T>&, const EncoderParams<T>&, const Matrix<T>&,      \
                                    EncoderParams<T>&);

ESSAYMRC_INSTANTIATE_ENCODER(float)
ESSAYMRC_INSTANTIATE_ENCODER(double)

template EncoderParams<float> cast_params<float, double>(const EncoderParams<double>&);
template EncoderParams<double> cast_params<double, float>(const EncoderParams<float>&);
template EncoderParams<float> cast_params<float, float>(const EncoderParams<float>&);
template EncoderParams<double> cast_params<double, double>(const EncoderParams<double>&);

}  // namespace essaymrc
