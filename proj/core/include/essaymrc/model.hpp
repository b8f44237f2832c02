// All learnable tensors of the reading-comprehension model plus the
// verification settings that travel with a checkpoint.
#pragma once

#include <string>

#include "essaymrc/encoder.hpp"
#include "essaymrc/heads.hpp"

namespace essaymrc {

template <typename T>
struct ModelParams {
  EncoderParams<T> encoder;
  SpanHeadParams<T> span;
  VerifierHeadParams<T> verifier;
  VerificationSettings verification;

  const EncoderConfig& config() const { return encoder.config; }
};

template <typename Params, typename Fn>
void visit_model(Params& p, Fn&& fn) {
  visit_encoder(p.encoder, fn);
  fn(std::string("span.w_start"), p.span.w_start);
  fn(std::string("span.b_start"), p.span.b_start);
  fn(std::string("span.w_end"), p.span.w_end);
  fn(std::string("span.b_end"), p.span.b_end);
  fn(std::string("verifier.weight"), p.verifier.weight);
  fn(std::string("verifier.bias"), p.verifier.bias);
}

template <typename T>
ModelParams<T> init_model(const EncoderConfig& config);

template <typename T>
ModelParams<T> zeros_like(const ModelParams<T>& like);

template <typename To, typename From>
ModelParams<To> cast_model(const ModelParams<From>& from);

/// Raw model outputs for one sequence.
template <typename T>
struct ModelOutput {
  HiddenStates<T> hidden;
  ColVector<T> start_logits;
  ColVector<T> end_logits;
  Matrix<T> verifier_logits;  // 1 × 2: (logit_ans, logit_na)
};

template <typename T>
ModelOutput<T> forward(const ModelParams<T>& params, std::span<const TokenId> ids, EncoderTrace<T>* trace = nullptr);

struct Inference {
  SpanDistributions dist;
  FrontVerification front;
};

template <typename T>
Inference infer(const ModelParams<T>& params, const InputSequence& seq);

}  // namespace essaymrc
