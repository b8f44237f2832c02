// Accuracy of the answered/not-answered decision and answer-overlap F1.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "essaymrc/corpus.hpp"
#include "essaymrc/locator.hpp"
#include "essaymrc/seqbuild.hpp"

namespace essaymrc {

struct OverlapScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

enum class OverlapUnit { kWord, kSubword };

using SpanTokenizer = std::function<std::vector<std::string>(std::string_view)>;

/// Lowercased words from the whitespace/punctuation pre-tokenizer.
SpanTokenizer word_tokenizer();
/// Vocabulary pieces from the model tokenizer.
SpanTokenizer subword_tokenizer(const Vocabulary& vocab);
OverlapUnit parse_overlap_unit(std::string_view name);

/// Bag-of-tokens overlap: Num_overlap is the multiset intersection size.
OverlapScore overlap_counts(const std::vector<std::string>& predicted, const std::vector<std::string>& gold);

/// Both sides unanswerable scores (1,1,1); exactly one side unanswerable scores
/// (0,0,0); with several gold answers the best F1 wins.
OverlapScore overlap_f1(const std::optional<std::string>& predicted_text, const QAExample& gold,
                        const SpanTokenizer& tokenize);
OverlapScore overlap_f1(const Verdict& predicted, const QAExample& gold, const SpanTokenizer& tokenize);

struct ExampleEvaluation {
  std::string example_id;
  bool answered_pred = false;
  bool answered_gold = false;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvalResult {
  double accuracy = 0.0;
  double mean_overlap_f1 = 0.0;
  std::vector<ExampleEvaluation> per_example;
};

/// Fraction of gold examples whose answered flag is predicted correctly.
/// Throws ValidationError on an empty set, duplicate ids, or ids that do not align.
double accuracy(const std::vector<VerdictRecord>& verdicts, const std::vector<QAExample>& gold);

/// Per-example records in gold order; F1 is averaged over all examples.
EvalResult evaluate_predictions(const std::vector<VerdictRecord>& verdicts, const std::vector<QAExample>& gold,
                                const SpanTokenizer& tokenize);

/// "0.93 (+0.02)" style rendering with two decimals.
std::string format_with_delta(double value, double baseline);
std::string format_score(double value);

}  // namespace essaymrc
