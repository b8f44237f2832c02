#include <gtest/gtest.h>

#include <random>

#include "essaymrc/encoder.hpp"
#include "essaymrc/errors.hpp"
#include "reference.hpp"
#include "test_support.hpp"

namespace essaymrc {
namespace {

using testing::grid_relative_error;
using testing::reference_attention;
using testing::reference_ffn;
using testing::to_grid;

EncoderConfig literal_config(std::size_t d, std::size_t heads, std::uint64_t seed) {
  EncoderConfig c;
  c.layers = 1;
  c.d_model = d;
  c.heads = heads;
  c.ffn_inner = 2 * d;
  c.max_len = 16;
  c.vocab_size = 20;
  c.seed = seed;
  c.residual_norm = false;
  return c;
}

EncoderParams<double> random_params(const EncoderConfig& c, std::uint64_t seed) {
  auto p = init_encoder<double>(c);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 0.5);
  visit_encoder(p, [&](const std::string&, Matrix<double>& m) {
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  });
  return p;
}

Matrix<double> random_input(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix<double> x(rows, cols);
  for (Index i = 0; i < x.size(); ++i) x.data()[i] = dist(rng);
  return x;
}

TEST(EncoderConfig, Validation) {
  EncoderConfig c;
  c.vocab_size = 10;
  EXPECT_NO_THROW(c.validate());
  c.heads = 3;
  EXPECT_THROW(c.validate(), ConfigError);
  c.heads = 4;
  c.layers = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Attention, SingleTokenAttendsToItself) {
  const auto c = literal_config(4, 2, 1);
  const auto p = random_params(c, 2);
  std::mt19937_64 rng(3);
  const auto x = random_input(1, 4, rng);
  AttentionTrace<double> trace;
  const auto out = scaled_attention(x, p.layers[0], c, 1, &trace);
  for (const auto& w : trace.weights) EXPECT_DOUBLE_EQ(w(0, 0), 1.0);
  const Matrix<double> expected = (x * p.layers[0].w_v) * p.layers[0].w_o + p.layers[0].b_o;
  EXPECT_LT((out - expected).norm(), 1e-12);
}

TEST(Attention, IdenticalKeysGiveUniformWeights) {
  const auto c = literal_config(4, 2, 1);
  auto p = random_params(c, 2);
  p.layers[0].w_k.setZero();  // every key is the zero vector
  std::mt19937_64 rng(4);
  const auto x = random_input(5, 4, rng);
  AttentionTrace<double> trace;
  const auto out = scaled_attention(x, p.layers[0], c, 5, &trace);
  for (const auto& w : trace.weights)
    for (Index i = 0; i < w.size(); ++i) EXPECT_NEAR(w.data()[i], 0.2, 1e-15);
  const Matrix<double> mean_v = (x * p.layers[0].w_v).colwise().mean();
  const Matrix<double> row = mean_v * p.layers[0].w_o + p.layers[0].b_o;
  for (Index r = 0; r < out.rows(); ++r) EXPECT_LT((out.row(r) - row).norm(), 1e-12);
}

TEST(Attention, MatchesLoopReference) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t heads = 1 + static_cast<std::size_t>(trial % 3);
    const auto c = literal_config(heads * (2 + trial % 3), heads, static_cast<std::uint64_t>(trial));
    const auto p = random_params(c, 100 + static_cast<std::uint64_t>(trial));
    const Index tau = 1 + trial % 7;
    const auto x = random_input(tau, static_cast<Index>(c.d_model), rng);
    std::vector<testing::Grid> ref_weights;
    const auto ref = reference_attention(to_grid(x), p.layers[0], heads, &ref_weights);
    AttentionTrace<double> trace;
    const auto out = scaled_attention(x, p.layers[0], c, tau, &trace);
    EXPECT_LT(grid_relative_error(out, ref), 1e-10) << "trial " << trial;
    for (std::size_t h = 0; h < heads; ++h) EXPECT_LT(grid_relative_error(trace.weights[h], ref_weights[h]), 1e-10);
  }
}

TEST(EncoderLayer, LiteralFormMatchesLoopReference) {
  std::mt19937_64 rng(20);
  for (int trial = 0; trial < 120; ++trial) {
    const auto c = literal_config(6, 2, static_cast<std::uint64_t>(trial));
    const auto p = random_params(c, 200 + static_cast<std::uint64_t>(trial));
    const Index tau = 1 + trial % 6;
    const auto x = random_input(tau, 6, rng);
    const auto ref = reference_ffn(reference_attention(to_grid(x), p.layers[0], 2), p.layers[0]);
    EXPECT_LT(grid_relative_error(encoder_layer(x, p.layers[0], c, tau), ref), 1e-10) << "trial " << trial;
  }
}

TEST(EncoderLayer, ZeroFirstFfnLayerLeavesOnlySecondBias) {
  const auto c = literal_config(4, 2, 1);
  auto p = random_params(c, 5);
  p.layers[0].w_1.setZero();
  p.layers[0].b_1.setZero();
  std::mt19937_64 rng(6);
  const auto out = encoder_layer(random_input(3, 4, rng), p.layers[0], c, 3);
  for (Index r = 0; r < 3; ++r) EXPECT_EQ(out.row(r), p.layers[0].b_2.row(0));
}

TEST(EncoderLayer, ShapeIsPreserved) {
  auto c = literal_config(8, 2, 1);
  c.residual_norm = true;
  const auto p = init_encoder<double>(c);
  std::mt19937_64 rng(7);
  for (Index tau : {1, 5, 16}) {
    const auto out = encoder_layer(random_input(tau, 8, rng), p.layers[0], c, tau);
    EXPECT_EQ(out.rows(), tau);
    EXPECT_EQ(out.cols(), 8);
  }
}

TEST(AttentionProperty, RowsAreProbabilityVectors) {
  std::mt19937_64 rng(30);
  auto c = literal_config(8, 4, 1);
  c.residual_norm = true;
  c.layers = 2;
  for (int trial = 0; trial < 200; ++trial) {
    c.seed = static_cast<std::uint64_t>(trial);
    const auto p = random_params(c, static_cast<std::uint64_t>(trial) + 999);
    std::uniform_int_distribution<TokenId> tok(0, 19);
    std::vector<TokenId> ids(1 + static_cast<std::size_t>(trial % 16));
    for (auto& id : ids) id = tok(rng);
    EncoderTrace<double> trace;
    encode_ids<double>(ids, p, static_cast<Index>(ids.size()), &trace);
    for (const auto& layer : trace.layers)
      for (const auto& w : layer.attention.weights) {
        EXPECT_TRUE((w.array() >= 0.0).all() && (w.array() <= 1.0).all());
        for (Index r = 0; r < w.rows(); ++r) EXPECT_NEAR(w.row(r).sum(), 1.0, 1e-9);
      }
  }
}

class EncodeTest : public ::testing::Test {
 protected:
  EncoderConfig config() const {
    EncoderConfig c;
    c.layers = 2;
    c.d_model = 16;
    c.heads = 4;
    c.ffn_inner = 32;
    c.max_len = 32;
    c.vocab_size = 30;
    c.seed = 9;
    return c;
  }
  InputSequence make(const std::vector<TokenId>& q, const std::vector<TokenId>& e) const {
    return testing::sequence_from_ids(q, e, testing::small_vocab(26));
  }
};

TEST_F(EncodeTest, DeterministicWithOneRowPerToken) {
  const auto p = init_encoder<double>(config());
  const auto seq = make({5, 6}, {7, 8, 9});
  const auto a = encode(seq, p);
  const auto b = encode(seq, p);
  EXPECT_EQ(a.rows(), static_cast<Index>(seq.tau));
  EXPECT_TRUE(a == b);
}

TEST_F(EncodeTest, RejectsOutOfRangeIdsAndOverlongInput) {
  const auto p = init_encoder<double>(config());
  std::vector<TokenId> bad = {2, 30, 3};
  EXPECT_THROW(encode_ids<double>(bad, p, 3), ValidationError);
  std::vector<TokenId> longer(33, 4);
  EXPECT_THROW(encode_ids<double>(longer, p, 33), ValidationError);
}

TEST_F(EncodeTest, BatchedWithPaddingMatchesUnbatched) {
  const auto p = init_encoder<double>(config());
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<TokenId> tok(4, 29);
  std::uniform_int_distribution<std::size_t> len(1, 12);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<InputSequence> seqs;
    for (int s = 0; s < 3; ++s) {
      std::vector<TokenId> q(len(rng)), e(len(rng));
      for (auto& id : q) id = tok(rng);
      for (auto& id : e) id = tok(rng);
      seqs.push_back(make(q, e));
    }
    const auto batched = encode_batch<double>(seqs, p);
    ASSERT_EQ(batched.size(), seqs.size());
    for (std::size_t s = 0; s < seqs.size(); ++s) {
      const auto single = encode(seqs[s], p);
      ASSERT_EQ(batched[s].rows(), single.rows());
      EXPECT_LT((batched[s] - single).cwiseAbs().maxCoeff(), 1e-8);
    }
  }
}

TEST_F(EncodeTest, SwappingEssayTokensChangesTheOutput) {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<TokenId> tok(4, 29);
  for (int trial = 0; trial < 50; ++trial) {
    auto c = config();
    c.seed = static_cast<std::uint64_t>(trial);
    const auto p = init_encoder<double>(c);
    std::vector<TokenId> e(5);
    for (auto& id : e) id = tok(rng);
    e[1] = 4;
    e[3] = 5;
    auto swapped = e;
    std::swap(swapped[1], swapped[3]);
    EXPECT_FALSE(encode(make({6}, e), p) == encode(make({6}, swapped), p));
  }
}

TEST_F(EncodeTest, FiniteForLargeEmbeddings) {
  auto p = init_encoder<double>(config());
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> big(-10.0, 10.0);
  for (Index i = 0; i < p.token_embedding.size(); ++i) p.token_embedding.data()[i] = big(rng);
  const auto h = encode(make({5, 6, 7}, {8, 9, 10, 11}), p);
  EXPECT_TRUE(h.allFinite());
}

TEST(CastParams, RoundTripsThroughFloat) {
  EncoderConfig c;
  c.vocab_size = 12;
  c.d_model = 8;
  c.heads = 2;
  c.ffn_inner = 8;
  c.max_len = 8;
  const auto p = init_encoder<float>(c);
  const auto back = cast_params<float>(cast_params<double>(p));
  EXPECT_TRUE(back.token_embedding == p.token_embedding);
  EXPECT_TRUE(back.layers[1].w_2 == p.layers[1].w_2);
}

}  // namespace
}  // namespace essaymrc
