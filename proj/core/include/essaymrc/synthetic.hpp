// Seeded generator for surrogate corpora.
//
// Two built-in template banks:
//   essay         learner emails answering task requirements; answers are whole
//                 sentences of 25-100 characters, with optional grammar noise
//   encyclopedia  short factual paragraphs with factoid answers of a few
//                 characters (a stand-in for general-domain reading data)
//
// Answer templates mark the gold span with square brackets, e.g.
//   "[I need to change the time because {busy_reason}.]"
// and "{slot}" placeholders are bound once per essay from the bank's slot lists.
#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "essaymrc/corpus.hpp"

namespace essaymrc {

enum class SyntheticProfile { kEssay, kEncyclopedia };

struct RequirementTemplate {
  std::string id;
  std::vector<std::string> questions;
  std::vector<std::string> answers;
};

struct ScenarioTemplate {
  std::string id;
  std::string opening;
  std::vector<RequirementTemplate> requirements;
};

struct TemplateBank {
  std::vector<ScenarioTemplate> scenarios;
  std::map<std::string, std::vector<std::string>> slots;
  std::vector<std::string> fillers;
  std::vector<std::string> closings;

  /// Throws ConfigError on empty lists, unknown slots or answers without a bracketed span.
  void validate() const;
};

TemplateBank default_bank(SyntheticProfile profile);
TemplateBank parse_template_bank(const std::string& json_text);
TemplateBank load_template_bank(const std::string& path);

struct SyntheticConfig {
  SyntheticProfile profile = SyntheticProfile::kEssay;
  std::size_t count = 1000;
  double answerable_ratio = 0.6;
  /// Probability that a sentence receives one grammar error.
  double noise_rate = 0.1;
  std::size_t min_answer_chars = 25;
  std::size_t max_answer_chars = 100;
  std::size_t min_sentences = 3;
  std::size_t max_sentences = 8;
  std::size_t requirements_per_essay = 3;
  std::string id_prefix = "syn";

  /// Defaults for a profile (the encyclopedia profile uses a 3-30 character band and no noise).
  static SyntheticConfig for_profile(SyntheticProfile profile);
  void validate() const;
};

struct SyntheticCorpus {
  std::vector<QAExample> examples;
  /// Code point length of every emitted gold answer, in emission order.
  std::vector<std::size_t> answer_lengths;
};

/// Exactly round(count * answerable_ratio) examples are answerable.
SyntheticCorpus generate_synthetic(const SyntheticConfig& config, std::uint64_t seed);
SyntheticCorpus generate_synthetic(const SyntheticConfig& config, const TemplateBank& bank, std::uint64_t seed);

SyntheticProfile parse_profile(const std::string& name);
const char* profile_name(SyntheticProfile profile);

}  // namespace essaymrc
