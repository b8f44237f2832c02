#include "essaymrc/locator.hpp"

#include <nlohmann/json.hpp>

#include "essaymrc/errors.hpp"
#include "essaymrc/text.hpp"

namespace essaymrc {

std::size_t argmax_position(const std::vector<double>& probs) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[best]) best = i;
  }
  return best + 1;
}

CharSpan span_to_chars(const TokenSpan& span, const InputSequence& seq, std::string_view essay) {
  if (span.start < 1 || span.end > seq.tau || span.start > span.end) {
    throw ValidationError("token span outside the input sequence");
  }
  const auto& first = seq.at(span.start);
  const auto& last = seq.at(span.end);
  if (first.is_special() || last.is_special()) throw ValidationError("token span touches a special symbol");
  CharSpan out;
  out.char_start = *first.char_start;
  out.char_end = *last.char_end;
  if (out.char_end > essay.size() || out.char_start >= out.char_end) {
    throw ValidationError("token offsets outside the essay");
  }
  out.text = std::string(essay.substr(out.char_start, out.char_end - out.char_start));
  return out;
}

SpanDecision decide_span(const SpanDistributions& dist, const InputSequence& seq, bool verifier_answered,
                         const LocatorOptions& options) {
  if (dist.tau() != seq.tau || dist.end.size() != seq.tau) {
    throw ValidationError("distribution length does not match the input sequence");
  }
  SpanDecision out;
  const std::size_t start = argmax_position(dist.start);
  const std::size_t end = argmax_position(dist.end);
  const std::size_t lowest = options.paper_literal_region ? seq.m + 1 : seq.first_essay_position();
  if (!verifier_answered) {
    out.decision = Decision::kVerifierRejected;
  } else if (start < lowest || end < lowest) {
    out.decision = Decision::kOutsideEssay;
  } else if (start > end) {
    out.decision = Decision::kContradictory;
  } else {
    out.span = TokenSpan{std::max(start, seq.first_essay_position()), end};
    out.decision = out.span.start > out.span.end ? Decision::kOutsideEssay : Decision::kAnswered;
  }
  return out;
}

Verdict locate_response(const SpanDistributions& dist, const InputSequence& seq, const ScoreBundle& scores,
                        std::string_view essay, const LocatorOptions& options) {
  const auto d = decide_span(dist, seq, scores.answered, options);
  Verdict v;
  v.scores = scores;
  v.decision = d.decision;
  if (d.decision == Decision::kAnswered) {
    v.answered = true;
    v.token_span = d.span;
    v.span = span_to_chars(d.span, seq, essay);
  }
  return v;
}

const char* decision_name(Decision d) {
  switch (d) {
    case Decision::kAnswered: return "answered";
    case Decision::kVerifierRejected: return "verifier_rejected";
    case Decision::kOutsideEssay: return "outside_essay";
    case Decision::kContradictory: return "contradictory";
  }
  return "unknown";
}

VerdictRecord make_record(const Verdict& v, std::string question_id, std::string essay_id, std::string_view essay) {
  VerdictRecord r;
  r.question_id = std::move(question_id);
  r.essay_id = std::move(essay_id);
  r.answered = v.answered;
  r.score_final = v.scores.score_final;
  if (v.span) {
    r.char_start = utf8_codepoint_index(essay, v.span->char_start);
    r.char_end = utf8_codepoint_index(essay, v.span->char_end);
    r.text = v.span->text;
  }
  return r;
}

std::string to_json_line(const VerdictRecord& r) {
  nlohmann::ordered_json j;
  j["question_id"] = r.question_id;
  j["essay_id"] = r.essay_id;
  j["answered"] = r.answered;
  j["score_final"] = r.score_final;
  j["char_start"] = r.char_start ? nlohmann::ordered_json(*r.char_start) : nlohmann::ordered_json(nullptr);
  j["char_end"] = r.char_end ? nlohmann::ordered_json(*r.char_end) : nlohmann::ordered_json(nullptr);
  j["text"] = r.text ? nlohmann::ordered_json(*r.text) : nlohmann::ordered_json(nullptr);
  return j.dump();
}

VerdictRecord parse_verdict_line(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    VerdictRecord r;
    r.question_id = j.at("question_id").get<std::string>();
    r.essay_id = j.value("essay_id", "");
    r.answered = j.at("answered").get<bool>();
    r.score_final = j.value("score_final", 0.0);
    if (j.contains("char_start") && !j["char_start"].is_null()) r.char_start = j["char_start"].get<std::size_t>();
    if (j.contains("char_end") && !j["char_end"].is_null()) r.char_end = j["char_end"].get<std::size_t>();
    if (j.contains("text") && !j["text"].is_null()) r.text = j["text"].get<std::string>();
    if (r.answered != r.text.has_value()) {
      throw ValidationError("verdict '" + r.question_id + "': span must be present iff answered");
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad verdict record: ") + e.what());
  }
}

std::vector<VerdictRecord> load_verdicts(const std::string& path) {
  std::vector<VerdictRecord> out;
  std::size_t line_no = 0;
  for (const auto& line : read_lines(path)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      out.push_back(parse_verdict_line(line));
    } catch (const ParseError& e) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace essaymrc
