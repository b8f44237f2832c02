#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "essaymrc/corpus.hpp"
#include "essaymrc/errors.hpp"
#include "essaymrc/synthetic.hpp"
#include "essaymrc/text.hpp"

namespace essaymrc {
namespace {

SyntheticConfig essay_config(std::size_t count, double ratio) {
  auto c = SyntheticConfig::for_profile(SyntheticProfile::kEssay);
  c.count = count;
  c.answerable_ratio = ratio;
  return c;
}

TEST(Synthetic, SameSeedSameCorpus) {
  const auto c = essay_config(300, 0.6);
  const auto a = generate_synthetic(c, 42);
  const auto b = generate_synthetic(c, 42);
  EXPECT_EQ(a.examples, b.examples);
  EXPECT_EQ(a.answer_lengths, b.answer_lengths);
  EXPECT_NE(generate_synthetic(c, 43).examples, a.examples);
}

TEST(Synthetic, ExactAnswerableCount) {
  for (const auto& [count, ratio] : std::vector<std::pair<std::size_t, double>>{{1000, 0.7}, {5000, 0.6}, {7, 0.5}, {10, 0.0}, {10, 1.0}}) {
    const auto corpus = generate_synthetic(essay_config(count, ratio), 9);
    ASSERT_EQ(corpus.examples.size(), count);
    std::size_t answerable = 0;
    for (const auto& ex : corpus.examples) answerable += ex.answerable ? 1 : 0;
    EXPECT_EQ(answerable, static_cast<std::size_t>(std::llround(static_cast<double>(count) * ratio))) << count << " " << ratio;
  }
}

TEST(Synthetic, OffsetsAndLengthBandHold) {
  for (auto profile : {SyntheticProfile::kEssay, SyntheticProfile::kEncyclopedia}) {
    auto c = SyntheticConfig::for_profile(profile);
    c.count = 1000;
    const auto corpus = generate_synthetic(c, 3);
    std::size_t index = 0;
    for (const auto& ex : corpus.examples) {
      EXPECT_NO_THROW(ex.validate());
      EXPECT_FALSE(ex.question.empty());
      EXPECT_FALSE(ex.essay_id.empty());
      for (const auto& a : ex.gold_answers) {
        EXPECT_EQ(ex.context.substr(a.char_start, a.text.size()), a.text);
        const auto len = answer_length_chars(a);
        EXPECT_GE(len, c.min_answer_chars) << a.text;
        EXPECT_LE(len, c.max_answer_chars) << a.text;
        ASSERT_LT(index, corpus.answer_lengths.size());
        EXPECT_EQ(corpus.answer_lengths[index++], len);
      }
    }
    EXPECT_EQ(index, corpus.answer_lengths.size());
  }
}

TEST(Synthetic, HistogramMatchesRecordedLengths) {
  const auto corpus = generate_synthetic(essay_config(800, 0.6), 21);
  const auto stats = answer_length_stats(corpus.examples, 5);
  std::map<std::size_t, std::size_t> expected;
  for (auto len : corpus.answer_lengths) ++expected[len / 5];
  for (const auto& bin : stats.answer_length_histogram) {
    const auto it = expected.find(bin.bin_start / 5);
    EXPECT_EQ(bin.count, it == expected.end() ? 0u : it->second);
  }
  EXPECT_EQ(stats.answer_count, corpus.answer_lengths.size());
}

TEST(Synthetic, IdsAreUnique) {
  auto c = essay_config(600, 0.6);
  c.id_prefix = "dev";
  const auto corpus = generate_synthetic(c, 1);
  std::map<std::string, int> seen;
  for (const auto& ex : corpus.examples) {
    EXPECT_EQ(ex.example_id.rfind("dev", 0), 0u);
    EXPECT_EQ(++seen[ex.example_id], 1);
  }
}

TEST(Synthetic, RejectsBadConfig) {
  auto c = essay_config(10, 1.5);
  EXPECT_THROW(c.validate(), ConfigError);
  c = essay_config(10, 0.5);
  c.min_answer_chars = 50;
  c.max_answer_chars = 10;
  EXPECT_THROW(c.validate(), ConfigError);
  c = essay_config(10, 0.5);
  c.noise_rate = -0.1;
  EXPECT_THROW(generate_synthetic(c, 1), ConfigError);
}

TEST(TemplateBank, ValidationCatchesMistakes) {
  auto bank = default_bank(SyntheticProfile::kEssay);
  EXPECT_NO_THROW(bank.validate());
  auto broken = bank;
  broken.scenarios[0].requirements[0].answers[0] = "no brackets here";
  EXPECT_THROW(broken.validate(), ConfigError);
  broken = bank;
  broken.scenarios[0].requirements[0].answers[0] = "[I like {no_such_slot}.]";
  EXPECT_THROW(broken.validate(), ConfigError);
  broken = bank;
  broken.scenarios.clear();
  EXPECT_THROW(broken.validate(), ConfigError);
}

TEST(TemplateBank, CustomBankFromJson) {
  const auto bank = parse_template_bank(R"({
    "scenarios": [{"id": "s", "opening": "Dear {name},",
      "requirements": [{"id": "r", "questions": ["Say what you will bring."],
                        "answers": ["[I will bring some {food} for everyone to share.]"]}]}],
    "slots": {"name": ["Sam", "Alex"], "food": ["bread", "fresh fruit"]},
    "fillers": ["The weather is nice."],
    "closings": ["Bye."]})");
  auto c = essay_config(20, 0.5);
  c.requirements_per_essay = 1;
  const auto corpus = generate_synthetic(c, bank, 4);
  ASSERT_EQ(corpus.examples.size(), 20u);
  for (const auto& ex : corpus.examples) {
    EXPECT_NE(ex.context.find("Dear "), std::string::npos);
    if (ex.answerable) {
      EXPECT_EQ(ex.gold_answers[0].text.rfind("I will bring some ", 0), 0u);
    }
  }
  EXPECT_THROW(parse_template_bank("{"), ParseError);
}

TEST(Profile, Names) {
  EXPECT_EQ(parse_profile("essay"), SyntheticProfile::kEssay);
  EXPECT_STREQ(profile_name(parse_profile("encyclopedia")), "encyclopedia");
  EXPECT_THROW(parse_profile("news"), ConfigError);
}

}  // namespace
}  // namespace essaymrc
