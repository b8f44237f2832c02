#include "essaymrc/model.hpp"

#include <random>
#include <vector>

namespace essaymrc {

template <typename T>
ModelParams<T> init_model(const EncoderConfig& config) {
  ModelParams<T> p;
  p.encoder = init_encoder<T>(config);
  // Head weights draw from a stream independent of the encoder's.
  std::mt19937_64 rng(config.seed ^ 0x9E3779B97F4A7C15ULL);
  std::normal_distribution<double> dist(0.0, config.init_std);
  const auto d = static_cast<Index>(config.d_model);
  auto normal = [&](Index rows, Index cols) {
    Matrix<T> m(rows, cols);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<T>(dist(rng));
    return m;
  };
  p.span.w_start = normal(d, 1);
  p.span.b_start = Matrix<T>::Zero(1, 1);
  p.span.w_end = normal(d, 1);
  p.span.b_end = Matrix<T>::Zero(1, 1);
  p.verifier.weight = normal(d, 2);
  p.verifier.bias = Matrix<T>::Zero(1, 2);
  return p;
}

template <typename T>
ModelParams<T> zeros_like(const ModelParams<T>& like) {
  ModelParams<T> z = like;
  visit_model(z, [](const std::string&, Matrix<T>& m) { m.setZero(); });
  return z;
}

template <typename To, typename From>
ModelParams<To> cast_model(const ModelParams<From>& from) {
  ModelParams<To> to;
  to.encoder = cast_params<To>(from.encoder);
  to.span.w_start = from.span.w_start.template cast<To>();
  to.span.b_start = from.span.b_start.template cast<To>();
  to.span.w_end = from.span.w_end.template cast<To>();
  to.span.b_end = from.span.b_end.template cast<To>();
  to.verifier.weight = from.verifier.weight.template cast<To>();
  to.verifier.bias = from.verifier.bias.template cast<To>();
  to.verification = from.verification;
  return to;
}

template <typename T>
ModelOutput<T> forward(const ModelParams<T>& params, std::span<const TokenId> ids, EncoderTrace<T>* trace) {
  ModelOutput<T> out;
  out.hidden = encode_ids<T>(ids, params.encoder, static_cast<Index>(ids.size()), trace);
  auto [start, end] = span_logits(out.hidden, params.span);
  out.start_logits = std::move(start);
  out.end_logits = std::move(end);
  out.verifier_logits = out.hidden.row(0) * params.verifier.weight + params.verifier.bias;
  return out;
}

template <typename T>
Inference infer(const ModelParams<T>& params, const InputSequence& seq) {
  const auto ids = seq.ids();
  const HiddenStates<T> hidden = encode_ids<T>(ids, params.encoder, static_cast<Index>(ids.size()));
  Inference out;
  out.dist = span_probabilities(hidden, params.span);
  out.front = external_front_verification<T>(hidden.topRows(1), params.verifier);
  return out;
}

template ModelParams<float> init_model<float>(const EncoderConfig&);
template ModelParams<double> init_model<double>(const EncoderConfig&);
template ModelParams<float> zeros_like(const ModelParams<float>&);
template ModelParams<double> zeros_like(const ModelParams<double>&);
template ModelParams<float> cast_model<float, double>(const ModelParams<double>&);
template ModelParams<double> cast_model<double, float>(const ModelParams<float>&);
template ModelParams<float> cast_model<float, float>(const ModelParams<float>&);
template ModelParams<double> cast_model<double, double>(const ModelParams<double>&);
template ModelOutput<float> forward(const ModelParams<float>&, std::span<const TokenId>, EncoderTrace<float>*);
template ModelOutput<double> forward(const ModelParams<double>&, std::span<const TokenId>, EncoderTrace<double>*);
template Inference infer(const ModelParams<float>&, const InputSequence&);
template Inference infer(const ModelParams<double>&, const InputSequence&);

}  // namespace essaymrc
