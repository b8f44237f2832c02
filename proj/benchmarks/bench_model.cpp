#include <benchmark/benchmark.h>

#include <random>

#include "essaymrc/heads.hpp"
#include "essaymrc/model.hpp"
#include "essaymrc/synthetic.hpp"
#include "essaymrc/train.hpp"

namespace essaymrc {
namespace {

InputSequence random_sequence(std::size_t tau, std::size_t vocab_size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<TokenId> tok(4, static_cast<TokenId>(vocab_size - 1));
  std::vector<Token> q(8), e(tau - 10);
  for (auto& t : q) t.id = tok(rng);
  for (std::size_t i = 0; i < e.size(); ++i) {
    e[i].id = tok(rng);
    e[i].char_start = 2 * i;
    e[i].char_end = 2 * i + 1;
  }
  return assemble_tokens(q, e);
}

EncoderConfig desk(std::size_t vocab_size) {
  EncoderConfig c;
  c.vocab_size = vocab_size;
  c.seed = 1;
  return c;
}

template <typename T>
void BM_Infer(benchmark::State& state) {
  const auto tau = static_cast<std::size_t>(state.range(0));
  const auto params = init_model<T>(desk(1000));
  const auto seq = random_sequence(tau, 1000, 2);
  for (auto _ : state) benchmark::DoNotOptimize(infer(params, seq));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(tau));
}
BENCHMARK(BM_Infer<float>)->Arg(64)->Arg(128)->Arg(256)->Arg(512);
BENCHMARK(BM_Infer<double>)->Arg(128);

void BM_LossAndGradient(benchmark::State& state) {
  const auto tau = static_cast<std::size_t>(state.range(0));
  const auto params = init_model<float>(desk(1000));
  auto grad = zeros_like(params);
  TrainingExample ex;
  ex.seq = random_sequence(tau, 1000, 3);
  ex.answerable = true;
  ex.gold_start = 12;
  ex.gold_end = 15;
  for (auto _ : state) benchmark::DoNotOptimize(loss_and_gradient(params, ex, {}, grad));
}
BENCHMARK(BM_LossAndGradient)->Arg(64)->Arg(128)->Arg(256);

void BM_ThresholdVerification(benchmark::State& state) {
  const auto tau = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(4);
  std::normal_distribution<double> logit(0.0, 2.0);
  std::vector<double> s(tau), e(tau);
  for (auto& x : s) x = logit(rng);
  for (auto& x : e) x = logit(rng);
  const SpanDistributions d{softmax(s), softmax(e)};
  for (auto _ : state) benchmark::DoNotOptimize(threshold_verification(d));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ThresholdVerification)->RangeMultiplier(4)->Range(16, 4096)->Complexity(benchmark::oN);

}  // namespace
}  // namespace essaymrc
