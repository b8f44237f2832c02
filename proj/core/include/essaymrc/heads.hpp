// Span prediction and answerable verification heads.
//
//   Prob_start = softmax(H·w_start + b_start), Prob_end likewise
//   score_ext   = logit_na - logit_ans                 (from the [CLS] row)
//   score_has   = max p_start^k + p_end^l, 1 < k <= l <= tau
//   score_null  = p_start^1 + p_end^1
//   score_diff  = score_null - score_has
//   score_final = beta1 * score_diff + beta2 * score_ext
//
// Both components grow when "no answer" is more likely, so the verdict is
// "answered" iff score_final <= zeta. `paper_literal_threshold` flips this to
// "answered" iff score_final > zeta.
#pragma once

#include <cstddef>
#include <vector>

#include "essaymrc/tensor.hpp"

namespace essaymrc {

template <typename T>
struct SpanHeadParams {
  Matrix<T> w_start, b_start;  // d_model × 1, 1 × 1
  Matrix<T> w_end, b_end;
};

template <typename T>
struct VerifierHeadParams {
  Matrix<T> weight;  // d_model × 2; column 0 -> logit_ans, column 1 -> logit_na
  Matrix<T> bias;    // 1 × 2
};

struct VerificationSettings {
  double beta1 = 0.5;
  double beta2 = 0.5;
  double zeta = 0.0;
  bool paper_literal_threshold = false;

  bool answered(double score_final) const {
    return paper_literal_threshold ? score_final > zeta : score_final <= zeta;
  }
};

/// 1-indexed view of the start/end distributions over the tau positions of T.
struct SpanDistributions {
  std::vector<double> start;
  std::vector<double> end;

  std::size_t tau() const { return start.size(); }
  double p_start(std::size_t position) const { return start.at(position - 1); }
  double p_end(std::size_t position) const { return end.at(position - 1); }
};

struct FrontVerification {
  double logit_ans = 0.0;
  double logit_na = 0.0;
  double score_ext = 0.0;
};

struct ThresholdVerification {
  double score_has = 0.0;
  double score_null = 0.0;
  double score_diff = 0.0;
};

struct ScoreBundle {
  double score_ext = 0.0;
  double score_has = 0.0;
  double score_null = 0.0;
  double score_diff = 0.0;
  double score_final = 0.0;
  bool answered = false;
};

/// Per-position start and end logits (tau entries each).
template <typename T>
std::pair<ColVector<T>, ColVector<T>> span_logits(const Matrix<T>& hidden, const SpanHeadParams<T>& params);

/// Softmax in 64-bit regardless of the model precision.
std::vector<double> softmax(const std::vector<double>& logits);

template <typename T>
SpanDistributions span_probabilities(const Matrix<T>& hidden, const SpanHeadParams<T>& params);

/// `h_cls` is row 1 of the final hidden states. Logits are pre-softmax.
template <typename T>
FrontVerification external_front_verification(const Matrix<T>& h_cls, const VerifierHeadParams<T>& params);

/// Linear scan over end positions keeping the running maximum start
/// probability. Throws ValidationError when tau < 2.
ThresholdVerification threshold_verification(const SpanDistributions& dist);

struct RearVerification {
  double score_final = 0.0;
  bool answered = false;
};

RearVerification rear_verification(double score_diff, double score_ext, const VerificationSettings& settings);

ScoreBundle verify(const SpanDistributions& dist, const FrontVerification& front,
                   const VerificationSettings& settings);

}  // namespace essaymrc
