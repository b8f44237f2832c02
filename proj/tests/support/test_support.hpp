// Shared fixtures for the unit and acceptance tests.
#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "essaymrc/model.hpp"
#include "essaymrc/seqbuild.hpp"
#include "essaymrc/train.hpp"

namespace essaymrc::testing {

/// Reserved terms plus `extra` single-letter-ish filler terms.
inline Vocabulary small_vocab(std::size_t extra = 12) {
  std::vector<std::string> terms = {"[PAD]", "[UNK]", "[CLS]", "[SEP]"};
  for (std::size_t i = 0; i < extra; ++i) terms.push_back("w" + std::to_string(i));
  return Vocabulary(std::move(terms));
}

inline EncoderConfig tiny_config(std::size_t vocab_size, std::uint64_t seed = 1, bool residual_norm = true) {
  EncoderConfig c;
  c.layers = 2;
  c.d_model = 8;
  c.heads = 2;
  c.ffn_inner = 12;
  c.max_len = 16;
  c.vocab_size = vocab_size;
  c.seed = seed;
  c.residual_norm = residual_norm;
  return c;
}

/// Randomizes every tensor (including norms and biases) with a wider spread
/// than the default initialization, so gradients are not dominated by zeros.
template <typename T>
void scramble(ModelParams<T>& p, std::uint64_t seed, double scale = 0.3) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, scale);
  visit_model(p, [&](const std::string& name, Matrix<T>& m) {
    const bool gain = name.find("gain") != std::string::npos;
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<T>((gain ? 1.0 : 0.0) + dist(rng));
  });
}

/// Builds a sequence directly from ids: [CLS] q.. [SEP] e..
inline InputSequence sequence_from_ids(const std::vector<TokenId>& question, const std::vector<TokenId>& essay,
                                       const Vocabulary& vocab) {
  InputSequence seq;
  auto push = [&](TokenId id, std::optional<std::size_t> start) {
    Token t;
    t.id = id;
    t.surface = vocab.term(id);
    if (start) {
      t.char_start = *start;
      t.char_end = *start + 1;
    }
    seq.tokens.push_back(t);
  };
  push(Vocabulary::kCls, std::nullopt);
  for (auto id : question) push(id, std::nullopt);
  push(Vocabulary::kSep, std::nullopt);
  for (std::size_t i = 0; i < essay.size(); ++i) push(essay[i], 2 * i);
  seq.m = question.size();
  seq.n = essay.size();
  seq.tau = seq.m + seq.n + 2;
  return seq;
}

inline double relative_error(double a, double b) {
  const double denom = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / denom;
}

}  // namespace essaymrc::testing
