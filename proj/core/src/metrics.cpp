#include "essaymrc/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <unordered_map>

#include "essaymrc/errors.hpp"
#include "essaymrc/text.hpp"

namespace essaymrc {
namespace {

std::unordered_map<std::string, const VerdictRecord*> index_verdicts(const std::vector<VerdictRecord>& verdicts,
                                                                     const std::vector<QAExample>& gold) {
  if (gold.empty()) throw ValidationError("empty evaluation set");
  if (verdicts.size() != gold.size()) {
    throw ValidationError("prediction count " + std::to_string(verdicts.size()) + " does not match gold count " +
                          std::to_string(gold.size()));
  }
  std::unordered_map<std::string, const VerdictRecord*> by_id;
  for (const auto& v : verdicts) {
    if (!by_id.emplace(v.question_id, &v).second) throw ValidationError("duplicate prediction id " + v.question_id);
  }
  for (const auto& g : gold) {
    if (!by_id.count(g.example_id)) throw ValidationError("no prediction for example " + g.example_id);
  }
  return by_id;
}

}  // namespace

SpanTokenizer word_tokenizer() {
  return [](std::string_view text) { return word_strings(text); };
}

SpanTokenizer subword_tokenizer(const Vocabulary& vocab) {
  return [&vocab](std::string_view text) {
    std::vector<std::string> out;
    for (const auto& t : tokenize(text, vocab)) out.push_back(vocab.term(t.id));
    return out;
  };
}

OverlapUnit parse_overlap_unit(std::string_view name) {
  if (name == "word") return OverlapUnit::kWord;
  if (name == "subword") return OverlapUnit::kSubword;
  throw ConfigError("unknown overlap unit: " + std::string(name));
}

OverlapScore overlap_counts(const std::vector<std::string>& predicted, const std::vector<std::string>& gold) {
  OverlapScore s;
  if (predicted.empty() || gold.empty()) return s;
  std::map<std::string, long> counts;
  for (const auto& t : gold) ++counts[t];
  std::size_t overlap = 0;
  for (const auto& t : predicted) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  if (overlap == 0) return s;
  s.precision = static_cast<double>(overlap) / static_cast<double>(predicted.size());
  s.recall = static_cast<double>(overlap) / static_cast<double>(gold.size());
  s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

OverlapScore overlap_f1(const std::optional<std::string>& predicted_text, const QAExample& gold,
                        const SpanTokenizer& tokenize) {
  const bool pred_answered = predicted_text.has_value();
  if (!pred_answered && !gold.answerable) return {1.0, 1.0, 1.0};
  if (pred_answered != gold.answerable) return {};
  const auto pred_tokens = tokenize(*predicted_text);
  OverlapScore best;
  bool first = true;
  for (const auto& a : gold.gold_answers) {
    const auto s = overlap_counts(pred_tokens, tokenize(a.text));
    if (first || s.f1 > best.f1) best = s;
    first = false;
  }
  return best;
}

OverlapScore overlap_f1(const Verdict& predicted, const QAExample& gold, const SpanTokenizer& tokenize) {
  std::optional<std::string> text;
  if (predicted.answered && predicted.span) text = predicted.span->text;
  return overlap_f1(text, gold, tokenize);
}

double accuracy(const std::vector<VerdictRecord>& verdicts, const std::vector<QAExample>& gold) {
  const auto by_id = index_verdicts(verdicts, gold);
  std::size_t correct = 0;
  for (const auto& g : gold) {
    if (by_id.at(g.example_id)->answered == g.answerable) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(gold.size());
}

EvalResult evaluate_predictions(const std::vector<VerdictRecord>& verdicts, const std::vector<QAExample>& gold,
                                const SpanTokenizer& tokenize) {
  const auto by_id = index_verdicts(verdicts, gold);
  EvalResult r;
  std::size_t correct = 0;
  double f1_sum = 0.0;
  for (const auto& g : gold) {
    const auto& v = *by_id.at(g.example_id);
    ExampleEvaluation e;
    e.example_id = g.example_id;
    e.answered_pred = v.answered;
    e.answered_gold = g.answerable;
    std::optional<std::string> text;
    if (v.answered) text = v.text.value_or("");
    const auto s = overlap_f1(text, g, tokenize);
    e.precision = s.precision;
    e.recall = s.recall;
    e.f1 = s.f1;
    if (e.answered_pred == e.answered_gold) ++correct;
    f1_sum += e.f1;
    r.per_example.push_back(std::move(e));
  }
  r.accuracy = static_cast<double>(correct) / static_cast<double>(gold.size());
  r.mean_overlap_f1 = f1_sum / static_cast<double>(gold.size());
  return r;
}

std::string format_score(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  return buf;
}

std::string format_with_delta(double value, double baseline) {
  // Both sides are rounded to two decimals before subtracting.
  const double v = std::round(value * 100.0) / 100.0;
  const double b = std::round(baseline * 100.0) / 100.0;
  double d = v - b;
  if (std::abs(d) < 0.005) d = 0.0;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f (%+.2f)", v, d);
  return buf;
}

}  // namespace essaymrc
