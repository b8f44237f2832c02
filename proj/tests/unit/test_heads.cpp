#include <gtest/gtest.h>

#include <random>

#include "essaymrc/errors.hpp"
#include "essaymrc/heads.hpp"
#include "reference.hpp"
#include "test_support.hpp"

namespace essaymrc {
namespace {

using testing::brute_force_score_has;

SpanDistributions random_distribution(std::size_t tau, std::mt19937_64& rng) {
  std::normal_distribution<double> logit(0.0, 2.0);
  std::vector<double> s(tau), e(tau);
  for (auto& x : s) x = logit(rng);
  for (auto& x : e) x = logit(rng);
  return {softmax(s), softmax(e)};
}

Matrix<double> random_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix<double> m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

SpanHeadParams<double> random_span_head(Index d, std::mt19937_64& rng) {
  return {random_matrix(d, 1, rng), random_matrix(1, 1, rng), random_matrix(d, 1, rng), random_matrix(1, 1, rng)};
}

TEST(SpanProbabilities, SumToOne) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    const Index tau = 1 + trial % 40;
    const auto dist = span_probabilities(random_matrix(tau, 8, rng), random_span_head(8, rng));
    double s = 0.0, e = 0.0;
    for (std::size_t i = 0; i < dist.tau(); ++i) {
      ASSERT_GE(dist.start[i], 0.0);
      ASSERT_LE(dist.start[i], 1.0);
      s += dist.start[i];
      e += dist.end[i];
    }
    EXPECT_NEAR(s, 1.0, 1e-9);
    EXPECT_NEAR(e, 1.0, 1e-9);
  }
}

TEST(SpanProbabilities, ZeroWeightsAreUniform) {
  std::mt19937_64 rng(2);
  SpanHeadParams<double> head{Matrix<double>::Zero(8, 1), Matrix<double>::Zero(1, 1), Matrix<double>::Zero(8, 1),
                              Matrix<double>::Zero(1, 1)};
  const auto dist = span_probabilities(random_matrix(7, 8, rng), head);
  for (double p : dist.start) EXPECT_NEAR(p, 1.0 / 7.0, 1e-15);
}

TEST(SpanProbabilities, MatchesLoopReference) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto h = random_matrix(5, 6, rng);
    const auto head = random_span_head(6, rng);
    const auto dist = span_probabilities(h, head);
    std::vector<double> logits(5);
    double max = -INFINITY;
    for (Index u = 0; u < 5; ++u) {
      double z = head.b_start(0, 0);
      for (Index c = 0; c < 6; ++c) z += h(u, c) * head.w_start(c, 0);
      logits[static_cast<std::size_t>(u)] = z;
      max = std::max(max, z);
    }
    double total = 0.0;
    for (double z : logits) total += std::exp(z - max);
    for (std::size_t u = 0; u < 5; ++u) {
      EXPECT_LT(testing::relative_error(dist.start[u], std::exp(logits[u] - max) / total), 1e-10);
    }
  }
}

TEST(FrontVerification, DifferenceOfLogits) {
  VerifierHeadParams<double> head{Matrix<double>::Zero(2, 2), Matrix<double>(1, 2)};
  head.bias << 0.5, 2.0;
  const auto f = external_front_verification(Matrix<double>(Matrix<double>::Zero(1, 2)), head);
  EXPECT_DOUBLE_EQ(f.logit_ans, 0.5);
  EXPECT_DOUBLE_EQ(f.logit_na, 2.0);
  EXPECT_DOUBLE_EQ(f.score_ext, 1.5);
  head.bias << 1.0, 1.0;
  EXPECT_DOUBLE_EQ(external_front_verification(Matrix<double>(Matrix<double>::Zero(1, 2)), head).score_ext, 0.0);
}

TEST(FrontVerification, MatchesLoopDotProducts) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const auto h = random_matrix(1, 9, rng);
    VerifierHeadParams<double> head{random_matrix(9, 2, rng), random_matrix(1, 2, rng)};
    double ans = head.bias(0, 0), na = head.bias(0, 1);
    for (Index c = 0; c < 9; ++c) {
      ans += h(0, c) * head.weight(c, 0);
      na += h(0, c) * head.weight(c, 1);
    }
    EXPECT_NEAR(external_front_verification(h, head).score_ext, na - ans, 1e-12);
  }
}

TEST(ThresholdVerification, WorkedExample) {
  const SpanDistributions d{{0.1, 0.2, 0.7}, {0.1, 0.6, 0.3}};
  const auto t = threshold_verification(d);
  EXPECT_DOUBLE_EQ(t.score_has, 1.0);
  EXPECT_DOUBLE_EQ(t.score_null, 0.2);
  EXPECT_DOUBLE_EQ(t.score_diff, 0.2 - 1.0);
}

TEST(ThresholdVerification, TwoPositions) {
  const SpanDistributions d{{0.3, 0.7}, {0.6, 0.4}};
  EXPECT_DOUBLE_EQ(threshold_verification(d).score_has, 0.7 + 0.4);
}

TEST(ThresholdVerification, RejectsSingletons) {
  EXPECT_THROW(threshold_verification(SpanDistributions{{1.0}, {1.0}}), ValidationError);
}

TEST(ThresholdVerification, LinearScanEqualsBruteForce) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto d = random_distribution(2 + static_cast<std::size_t>(trial % 30), rng);
    const auto t = threshold_verification(d);
    EXPECT_EQ(t.score_has, brute_force_score_has(d));
    for (std::size_t k = 2; k <= d.tau(); ++k) EXPECT_GE(t.score_has, d.p_start(k) + d.p_end(k));
    EXPECT_GE(t.score_null, 0.0);
    EXPECT_LE(t.score_null + t.score_has, 2.0 + 1e-12);
    EXPECT_EQ(t.score_diff, t.score_null - t.score_has);
  }
}

TEST(RearVerification, WeightedSum) {
  VerificationSettings s;
  const auto r = rear_verification(-0.8, 1.5, s);
  EXPECT_NEAR(r.score_final, 0.35, 1e-15);
  EXPECT_FALSE(r.answered);
}

TEST(RearVerification, ConfidentAnswerIsAnswered) {
  VerificationSettings s;
  s.beta1 = 1.0;
  s.beta2 = 0.0;
  const auto r = rear_verification(-0.8, 123.0, s);
  EXPECT_DOUBLE_EQ(r.score_final, -0.8);
  EXPECT_TRUE(r.answered);
}

TEST(RearVerification, BoundaryCountsAsAnswered) {
  VerificationSettings s;
  s.beta1 = 1.0;
  s.beta2 = 0.0;
  s.zeta = 0.25;
  EXPECT_TRUE(rear_verification(0.25, 0.0, s).answered);
  s.paper_literal_threshold = true;
  EXPECT_FALSE(rear_verification(0.25, 0.0, s).answered);
  EXPECT_TRUE(rear_verification(0.3, 0.0, s).answered);
}

TEST(RearVerification, MonotoneInExternalScore) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  VerificationSettings s;
  for (int trial = 0; trial < 2000; ++trial) {
    s.zeta = u(rng);
    const double diff = u(rng), ext = u(rng), bump = std::abs(u(rng));
    if (!rear_verification(diff, ext, s).answered) {
      EXPECT_FALSE(rear_verification(diff, ext + bump, s).answered);
    }
  }
}

TEST(Verify, BundleIdentities) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 500; ++trial) {
    VerificationSettings s;
    s.beta1 = u(rng);
    s.beta2 = u(rng);
    s.zeta = u(rng);
    FrontVerification f;
    f.logit_ans = u(rng);
    f.logit_na = u(rng);
    f.score_ext = f.logit_na - f.logit_ans;
    const auto b = verify(random_distribution(6, rng), f, s);
    EXPECT_NEAR(b.score_diff, b.score_null - b.score_has, 1e-12);
    EXPECT_NEAR(b.score_final, s.beta1 * b.score_diff + s.beta2 * b.score_ext, 1e-12);
    EXPECT_EQ(b.answered, b.score_final <= s.zeta);
  }
}

}  // namespace
}  // namespace essaymrc
