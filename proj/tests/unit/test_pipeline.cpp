#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>

#include "essaymrc/checkpoint.hpp"
#include "essaymrc/errors.hpp"
#include "essaymrc/pipeline.hpp"
#include "essaymrc/synthetic.hpp"
#include "essaymrc/train.hpp"
#include "test_support.hpp"

namespace essaymrc {
namespace {

const char* kEssay =
    "Dear Sam,\nI am sorry but I cannot come on Friday. I need to change the time because I am busy on Friday. "
    "Can we meet on Tuesday at six?\nBest wishes,";

Vocabulary essay_vocab() {
  return build_vocabulary({kEssay, "I need to change the time. Why do I need to change the time?"}, 300);
}

Engine<float> untrained_engine(const Vocabulary& vocab, std::uint64_t seed = 1) {
  EncoderConfig c;
  c.vocab_size = vocab.size();
  c.max_len = 128;
  c.seed = seed;
  return Engine<float>(init_model<float>(c), vocab);
}

TEST(Request, Validation) {
  EvaluationRequest r;
  r.essay = kEssay;
  EXPECT_THROW(r.validate(), ValidationError);
  r.requirements = {"explain why you need to change the time"};
  EXPECT_NO_THROW(r.validate());
  r.essay.clear();
  EXPECT_THROW(r.validate(), ValidationError);
}

TEST(Engine, RejectsMismatchedVocabulary) {
  const auto vocab = essay_vocab();
  EncoderConfig c;
  c.vocab_size = vocab.size() + 1;
  EXPECT_THROW(Engine<float>(init_model<float>(c), vocab), ValidationError);
}

TEST(Engine, OneVerdictPerRequirementInOrder) {
  const auto vocab = essay_vocab();
  const auto engine = untrained_engine(vocab);
  EvaluationRequest r{kEssay, {"explain why you need to change the time", "suggest another time", "say goodbye"}};
  const auto verdicts = engine.evaluate(r);
  ASSERT_EQ(verdicts.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(verdicts[i].requirement, r.requirements[i]);
    const auto& v = verdicts[i].verdict;
    EXPECT_EQ(v.answered, v.span.has_value());
    EXPECT_EQ(v.scores.score_final,
              engine.model().verification.beta1 * v.scores.score_diff + engine.model().verification.beta2 * v.scores.score_ext);
  }
  EXPECT_EQ(verdicts[0].question.normalized, "Why I need to change the time");
}

TEST(Engine, BatchMatchesSingleCallsAndIsDeterministic) {
  const auto vocab = essay_vocab();
  const auto engine = untrained_engine(vocab, 4);
  EvaluationRequest r{kEssay, {"explain why you need to change the time", "suggest another time"}};
  const auto a = engine.evaluate(r);
  const auto b = engine.evaluate(r);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto one = engine.evaluate_one(r.requirements[i], r.essay);
    EXPECT_EQ(one.verdict.scores.score_final, a[i].verdict.scores.score_final);
    EXPECT_EQ(one.verdict.span, a[i].verdict.span);
    EXPECT_EQ(b[i].verdict.scores.score_final, a[i].verdict.scores.score_final);
  }
}

TEST(Engine, ThresholdControlsTheVerdict) {
  const auto vocab = essay_vocab();
  auto engine = untrained_engine(vocab);
  engine.verification().zeta = -1e9;
  EXPECT_FALSE(engine.evaluate_one("explain why you need to change the time", kEssay).verdict.answered);
}

TEST(Engine, LoadChecksTheVocabularyFingerprint) {
  const auto vocab = essay_vocab();
  const auto dir = std::filesystem::temp_directory_path() / "essaymrc_pipeline";
  std::filesystem::create_directories(dir);
  const auto ckpt = (dir / "m.ckpt").string();
  const auto vocab_path = (dir / "vocab.txt").string();
  const auto engine = untrained_engine(vocab);
  save_checkpoint(ckpt, engine.model(), {vocab.fingerprint(), vocab.size(), ""});
  vocab.save(vocab_path);
  const auto loaded = Engine<float>::load(ckpt, vocab_path);
  EXPECT_EQ(loaded.evaluate_one("say why", kEssay).verdict.scores.score_final,
            engine.evaluate_one("say why", kEssay).verdict.scores.score_final);

  save_checkpoint(ckpt, engine.model(), {vocab.fingerprint() + 1, vocab.size(), ""});
  EXPECT_THROW(Engine<float>::load(ckpt, vocab_path), ValidationError);
  std::filesystem::remove_all(dir);
}

TEST(PredictCorpus, OversizedQuestionsAreNotAnswered) {
  const auto vocab = essay_vocab();
  EncoderConfig c;
  c.vocab_size = vocab.size();
  c.max_len = 16;
  const auto params = init_model<float>(c);
  QAExample ex;
  ex.example_id = "long";
  ex.essay_id = "e";
  ex.context = kEssay;
  ex.question = "explain why you need to change the time because I am busy on Friday and cannot come";
  const auto records = predict_corpus(params, vocab, default_rules(), {ex});
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].question_id, "long");
  EXPECT_FALSE(records[0].answered);
}

TEST(Engine, TrainedModelAnswersTheMatchingRequirement) {
  auto config = SyntheticConfig::for_profile(SyntheticProfile::kEssay);
  config.count = 48;
  config.answerable_ratio = 0.6;
  config.max_sentences = 4;
  config.noise_rate = 0.0;
  const auto corpus = generate_synthetic(config, 77).examples;
  std::vector<std::string> texts;
  for (const auto& ex : corpus) {
    texts.push_back(normalize(ex.question, default_rules()).normalized);
    texts.push_back(ex.context);
  }
  const auto vocab = build_vocabulary(texts, 500);
  EncoderConfig c;
  c.vocab_size = vocab.size();
  c.max_len = 128;
  c.seed = 2;
  auto params = init_model<float>(c);
  TrainConfig cfg;
  cfg.epochs = 60;
  cfg.batch_size = 16;
  cfg.learning_rate = 3e-3;
  MultiStageOptions opts;
  opts.max_len = 128;
  multi_stage_train(params, {{"fit", corpus, corpus, cfg}}, vocab, default_rules(), opts);
  const Engine<float> engine(params, vocab);

  // Pick an essay with one answered and at least one unanswered requirement.
  std::map<std::string, std::vector<const QAExample*>> by_essay;
  for (const auto& ex : corpus) by_essay[ex.essay_id].push_back(&ex);
  const std::vector<const QAExample*>* chosen = nullptr;
  for (const auto& [id, group] : by_essay) {
    const auto answered = std::count_if(group.begin(), group.end(), [](auto* e) { return e->answerable; });
    if (answered >= 1 && answered < static_cast<long>(group.size())) {
      chosen = &group;
      break;
    }
  }
  ASSERT_NE(chosen, nullptr);
  EvaluationRequest request;
  request.essay = chosen->front()->context;
  for (const auto* ex : *chosen) request.requirements.push_back(ex->question);
  const auto verdicts = engine.evaluate(request);
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    const auto* ex = (*chosen)[i];
    const auto& v = verdicts[i].verdict;
    EXPECT_EQ(v.answered, ex->answerable) << ex->question;
    if (ex->answerable && v.answered) {
      ASSERT_TRUE(v.span.has_value());
      EXPECT_LE(v.span->char_end, request.essay.size());
      EXPECT_EQ(request.essay.substr(v.span->char_start, v.span->char_end - v.span->char_start), v.span->text);
      EXPECT_EQ(v.span->text, ex->gold_answers.front().text);
    }
    EXPECT_TRUE(std::isfinite(v.scores.score_final));
  }
}

}  // namespace
}  // namespace essaymrc
