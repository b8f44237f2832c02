#include <benchmark/benchmark.h>

#include "essaymrc/metrics.hpp"
#include "essaymrc/qnorm.hpp"
#include "essaymrc/seqbuild.hpp"
#include "essaymrc/synthetic.hpp"

namespace essaymrc {
namespace {

const std::vector<QAExample>& essays() {
  static const auto corpus = [] {
    auto c = SyntheticConfig::for_profile(SyntheticProfile::kEssay);
    c.count = 300;
    return generate_synthetic(c, 1).examples;
  }();
  return corpus;
}

const Vocabulary& essay_vocab() {
  static const auto vocab = [] {
    std::vector<std::string> texts;
    for (const auto& ex : essays()) texts.push_back(ex.context);
    return build_vocabulary(texts, 2000);
  }();
  return vocab;
}

void BM_Tokenize(benchmark::State& state) {
  const auto& vocab = essay_vocab();
  std::size_t i = 0, bytes = 0;
  for (auto _ : state) {
    const auto& text = essays()[i++ % essays().size()].context;
    benchmark::DoNotOptimize(tokenize(text, vocab));
    bytes += text.size();
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(bytes));
}
BENCHMARK(BM_Tokenize);

void BM_Normalize(benchmark::State& state) {
  const auto rules = default_rules();
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(normalize(essays()[i++ % essays().size()].question, rules));
}
BENCHMARK(BM_Normalize);

void BM_Assemble(benchmark::State& state) {
  const auto rules = default_rules();
  const auto& vocab = essay_vocab();
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& ex = essays()[i++ % essays().size()];
    benchmark::DoNotOptimize(assemble(normalize(ex.question, rules), ex.context, vocab));
  }
}
BENCHMARK(BM_Assemble);

void BM_BuildVocabulary(benchmark::State& state) {
  std::vector<std::string> texts;
  for (const auto& ex : essays()) texts.push_back(ex.context);
  for (auto _ : state) benchmark::DoNotOptimize(build_vocabulary(texts, 2000));
}
BENCHMARK(BM_BuildVocabulary)->Unit(benchmark::kMillisecond);

void BM_OverlapF1(benchmark::State& state) {
  const auto tok = word_tokenizer();
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& ex = essays()[i++ % essays().size()];
    benchmark::DoNotOptimize(overlap_f1(ex.context.substr(0, 60), ex, tok));
  }
}
BENCHMARK(BM_OverlapF1);

}  // namespace
}  // namespace essaymrc
