// Response locating: turns the span distributions and the verification
// verdict into a final label and, when answered, a span of the original essay.
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "essaymrc/heads.hpp"
#include "essaymrc/seqbuild.hpp"

namespace essaymrc {

struct TokenSpan {
  std::size_t start = 0;  // 1-indexed positions in T, inclusive
  std::size_t end = 0;
  bool operator==(const TokenSpan&) const = default;
};

struct CharSpan {
  std::size_t char_start = 0;  // byte offsets into the essay, end exclusive
  std::size_t char_end = 0;
  std::string text;
  bool operator==(const CharSpan&) const = default;
};

enum class Decision {
  kAnswered,
  kVerifierRejected,   // rear verification said "not answered"
  kOutsideEssay,       // start or end falls on [CLS], the question or [SEP]
  kContradictory,      // start > end
};

struct Verdict {
  bool answered = false;
  Decision decision = Decision::kVerifierRejected;
  ScoreBundle scores;
  std::optional<CharSpan> span;
  std::optional<TokenSpan> token_span;
};

struct LocatorOptions {
  /// Accept positions >= m+1 (the literal cut) instead of >= m+3. Any part
  /// of the span that falls before the essay is clipped away.
  bool paper_literal_region = false;
};

/// Lowest position wins on ties.
std::size_t argmax_position(const std::vector<double>& probs);

struct SpanDecision {
  Decision decision = Decision::kVerifierRejected;
  TokenSpan span;  // meaningful only when decision == kAnswered
};

/// The rejection rules alone: argmax start/end, essay region, ordering.
SpanDecision decide_span(const SpanDistributions& dist, const InputSequence& seq, bool verifier_answered,
                         const LocatorOptions& options = {});

Verdict locate_response(const SpanDistributions& dist, const InputSequence& seq, const ScoreBundle& scores,
                        std::string_view essay, const LocatorOptions& options = {});

/// Throws ValidationError if a position lies outside T or carries no offsets.
CharSpan span_to_chars(const TokenSpan& span, const InputSequence& seq, std::string_view essay);

const char* decision_name(Decision d);

/// One line of the verdict output format. Offsets here are Unicode code point
/// offsets into the essay (the convention SQuAD uses for answer_start).
struct VerdictRecord {
  std::string question_id;
  std::string essay_id;
  bool answered = false;
  double score_final = 0.0;
  std::optional<std::size_t> char_start;
  std::optional<std::size_t> char_end;
  std::optional<std::string> text;
};

VerdictRecord make_record(const Verdict& v, std::string question_id, std::string essay_id, std::string_view essay);
/// {"question_id","essay_id","answered","score_final","char_start","char_end","text"}; absent spans are null.
std::string to_json_line(const VerdictRecord& r);
VerdictRecord parse_verdict_line(std::string_view line);
std::vector<VerdictRecord> load_verdicts(const std::string& path);

}  // namespace essaymrc
