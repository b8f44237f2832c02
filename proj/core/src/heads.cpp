#include "essaymrc/heads.hpp"

#include <algorithm>
#include <cmath>

#include "essaymrc/errors.hpp"

namespace essaymrc {

template <typename T>
std::pair<ColVector<T>, ColVector<T>> span_logits(const Matrix<T>& hidden, const SpanHeadParams<T>& params) {
  ColVector<T> start = (hidden * params.w_start.col(0)).array() + params.b_start(0, 0);
  ColVector<T> end = (hidden * params.w_end.col(0)).array() + params.b_end(0, 0);
  return {std::move(start), std::move(end)};
}

std::vector<double> softmax(const std::vector<double>& logits) {
  std::vector<double> out(logits.size());
  if (logits.empty()) return out;
  const double max = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - max);
    sum += out[i];
  }
  for (auto& p : out) p /= sum;
  return out;
}

template <typename T>
SpanDistributions span_probabilities(const Matrix<T>& hidden, const SpanHeadParams<T>& params) {
  auto [start, end] = span_logits(hidden, params);
  std::vector<double> s(static_cast<std::size_t>(start.size()));
  std::vector<double> e(s.size());
  for (Index i = 0; i < start.size(); ++i) {
    s[static_cast<std::size_t>(i)] = static_cast<double>(start(i));
    e[static_cast<std::size_t>(i)] = static_cast<double>(end(i));
  }
  return {softmax(s), softmax(e)};
}

template <typename T>
FrontVerification external_front_verification(const Matrix<T>& h_cls, const VerifierHeadParams<T>& params) {
  const Matrix<T> logits = h_cls.row(0) * params.weight + params.bias;
  FrontVerification out;
  out.logit_ans = static_cast<double>(logits(0, 0));
  out.logit_na = static_cast<double>(logits(0, 1));
  out.score_ext = out.logit_na - out.logit_ans;
  return out;
}

ThresholdVerification threshold_verification(const SpanDistributions& dist) {
  const std::size_t tau = dist.tau();
  if (tau < 2 || dist.end.size() != tau) {
    throw ValidationError("threshold verification needs tau >= 2 and equal-length distributions");
  }
  ThresholdVerification out;
  double best_start = dist.start[1];
  double best = best_start + dist.end[1];
  for (std::size_t l = 2; l < tau; ++l) {
    best_start = std::max(best_start, dist.start[l]);
    best = std::max(best, best_start + dist.end[l]);
  }
  out.score_has = best;
  out.score_null = dist.start[0] + dist.end[0];
  out.score_diff = out.score_null - out.score_has;
  return out;
}

RearVerification rear_verification(double score_diff, double score_ext, const VerificationSettings& settings) {
  RearVerification out;
  out.score_final = settings.beta1 * score_diff + settings.beta2 * score_ext;
  out.answered = settings.answered(out.score_final);
  return out;
}

ScoreBundle verify(const SpanDistributions& dist, const FrontVerification& front,
                   const VerificationSettings& settings) {
  const auto tav = threshold_verification(dist);
  const auto rear = rear_verification(tav.score_diff, front.score_ext, settings);
  ScoreBundle b;
  b.score_ext = front.score_ext;
  b.score_has = tav.score_has;
  b.score_null = tav.score_null;
  b.score_diff = tav.score_diff;
  b.score_final = rear.score_final;
  b.answered = rear.answered;
  return b;
}

template std::pair<ColVector<float>, ColVector<float>> span_logits(const Matrix<float>&,
                                                                   const SpanHeadParams<float>&);
template std::pair<ColVector<double>, ColVector<double>> span_logits(const Matrix<double>&,
                                                                     const SpanHeadParams<double>&);
template SpanDistributions span_probabilities(const Matrix<float>&, const SpanHeadParams<float>&);
template SpanDistributions span_probabilities(const Matrix<double>&, const SpanHeadParams<double>&);
template FrontVerification external_front_verification(const Matrix<float>&, const VerifierHeadParams<float>&);
template FrontVerification external_front_verification(const Matrix<double>&, const VerifierHeadParams<double>&);

}  // namespace essaymrc
