// Example records, dataset loaders and answer-length statistics.
//
// In memory, gold offsets are byte offsets into the UTF-8 context. On disk
// (SQuAD JSON and the line-delimited format below) `answer_start` counts
// Unicode code points.
//
// Line-delimited record format, one JSON object per line:
//   {"id": "...", "essay_id": "...", "question": "...", "context": "...",
//    "answerable": true, "answers": [{"text": "...", "answer_start": 17}]}
// `essay_id` is optional. Blank lines are ignored.
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace essaymrc {

struct GoldAnswer {
  std::string text;
  std::size_t char_start = 0;  // bytes
  bool operator==(const GoldAnswer&) const = default;
};

struct QAExample {
  std::string example_id;
  std::string essay_id;
  std::string question;
  std::string context;
  bool answerable = false;
  std::vector<GoldAnswer> gold_answers;

  /// Throws ValidationError naming the example when the answer list disagrees
  /// with `answerable` or an answer does not match the context at its offset.
  void validate() const;
  bool operator==(const QAExample&) const = default;
};

/// SQuAD 2.0 schema: data[].paragraphs[].{context, qas[].{id, question, is_impossible, answers[].{text, answer_start}}}.
std::vector<QAExample> parse_squad(const std::string& json_text);
std::vector<QAExample> load_squad(const std::string& path);

std::vector<QAExample> parse_sed_format(const std::string& text);
std::vector<QAExample> load_sed_format(const std::string& path);
std::string format_sed_record(const QAExample& example);
void write_sed_format(const std::string& path, const std::vector<QAExample>& examples);

/// Dispatches on extension: ".json" is SQuAD, anything else the line-delimited format.
std::vector<QAExample> load_corpus(const std::string& path);

struct HistogramBin {
  std::size_t bin_start = 0;
  std::size_t bin_end = 0;  // exclusive
  std::size_t count = 0;
  bool operator==(const HistogramBin&) const = default;
};

struct CorpusStats {
  std::size_t example_count = 0;
  std::size_t answerable_count = 0;
  std::size_t answer_count = 0;
  std::vector<HistogramBin> answer_length_histogram;
  std::optional<double> mean_answer_length_chars;
  bool operator==(const CorpusStats&) const = default;
};

/// Length of a gold answer in code points, surrounding whitespace excluded.
std::size_t answer_length_chars(const GoldAnswer& answer);

/// Every gold answer of every answerable example contributes one length.
CorpusStats answer_length_stats(const std::vector<QAExample>& examples, std::size_t bin_width = 5);

/// "bin_start,bin_end,count" rows with a header line.
std::string histogram_csv(const CorpusStats& stats);

}  // namespace essaymrc
