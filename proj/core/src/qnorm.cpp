#include "essaymrc/qnorm.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <sstream>

#include "essaymrc/errors.hpp"
#include "essaymrc/text.hpp"

namespace essaymrc {
namespace {

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
char upper(char c) { return (c >= 'a' && c <= 'z') ? static_cast<char>(c - 'a' + 'A') : c; }

std::string match_case(std::string_view source, const std::string& replacement) {
  std::string out = replacement;
  if (!source.empty() && !out.empty() && is_upper(source.front())) out.front() = upper(out.front());
  return out;
}

struct Rewrite {
  std::string text;
  std::vector<std::string> rules;
};

Rewrite switch_pronouns_traced(std::string_view question, const RewriteRuleSet& rules) {
  Rewrite out;
  std::size_t cursor = 0;
  for (const auto& w : split_words(question)) {
    const auto surface = question.substr(w.begin, w.end - w.begin);
    const auto key = to_lower_ascii(surface);
    auto it = std::find_if(rules.pronoun_map.begin(), rules.pronoun_map.end(),
                           [&](const auto& p) { return to_lower_ascii(p.first) == key; });
    if (it == rules.pronoun_map.end()) continue;
    out.text.append(question.substr(cursor, w.begin - cursor));
    out.text.append(match_case(surface, it->second));
    out.rules.push_back("pronoun:" + key + "->" + it->second);
    cursor = w.end;
  }
  out.text.append(question.substr(cursor));
  return out;
}

std::optional<std::size_t> first_question_word(std::string_view question, const RewriteRuleSet& rules) {
  for (const auto& w : split_words(question)) {
    const auto key = to_lower_ascii(question.substr(w.begin, w.end - w.begin));
    for (const auto& qw : rules.question_words) {
      if (to_lower_ascii(qw) == key) return w.begin;
    }
  }
  return std::nullopt;
}

}  // namespace

void RewriteRuleSet::validate() const {
  if (question_words.empty()) throw ConfigError("rule set has no question words");
  std::set<std::string> seen;
  for (const auto& [src, dst] : pronoun_map) {
    if (src.empty() || dst.empty()) throw ConfigError("empty pronoun rule");
    if (!seen.insert(to_lower_ascii(src)).second) {
      throw ConfigError("duplicate pronoun rule for '" + src + "'");
    }
  }
}

RewriteRuleSet default_rules() {
  RewriteRuleSet rules;
  rules.pronoun_map = {{"you", "I"}, {"your", "my"}, {"yours", "mine"}, {"yourself", "myself"}};
  rules.question_words = {"what", "how", "why", "where", "when", "who", "which"};
  rules.case_policy = CasePolicy::kCapitalizeFirst;
  return rules;
}

CasePolicy parse_case_policy(std::string_view name) {
  if (name == "preserve") return CasePolicy::kPreserve;
  if (name == "capitalize_first") return CasePolicy::kCapitalizeFirst;
  throw ConfigError("unknown case policy: " + std::string(name));
}

RewriteRuleSet parse_rules(std::string_view text, CasePolicy policy) {
  RewriteRuleSet rules;
  rules.case_policy = policy;
  enum class Section { kNone, kPronouns, kQuestionWords } section = Section::kNone;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line == "[pronouns]") {
      section = Section::kPronouns;
      continue;
    }
    if (line == "[question_words]") {
      section = Section::kQuestionWords;
      continue;
    }
    std::istringstream fields(line);
    std::vector<std::string> parts;
    for (std::string f; fields >> f;) parts.push_back(f);
    const auto where = "rules line " + std::to_string(line_no);
    switch (section) {
      case Section::kNone:
        throw ParseError(where + ": entry outside of a section");
      case Section::kPronouns:
        if (parts.size() != 2) throw ParseError(where + ": expected '<source> <replacement>'");
        rules.pronoun_map.emplace_back(parts[0], parts[1]);
        break;
      case Section::kQuestionWords:
        if (parts.size() != 1) throw ParseError(where + ": expected a single question word");
        rules.question_words.push_back(parts[0]);
        break;
    }
  }
  try {
    rules.validate();
  } catch (const ConfigError& e) {
    throw ParseError(e.what());
  }
  return rules;
}

RewriteRuleSet load_rules(const std::string& path, CasePolicy policy) {
  return parse_rules(read_file(path), policy);
}

std::string format_rules(const RewriteRuleSet& rules) {
  std::ostringstream out;
  out << "[pronouns]\n";
  for (const auto& [src, dst] : rules.pronoun_map) out << src << ' ' << dst << '\n';
  out << "[question_words]\n";
  for (const auto& w : rules.question_words) out << w << '\n';
  return out.str();
}

std::string switch_pronouns(std::string_view question, const RewriteRuleSet& rules) {
  return switch_pronouns_traced(question, rules).text;
}

std::string delete_redundant(std::string_view question, const RewriteRuleSet& rules) {
  const auto pos = first_question_word(question, rules);
  if (!pos || trim(question.substr(0, *pos)).empty()) return std::string(question);
  return std::string(question.substr(*pos));
}

NormalizedQuestion normalize(std::string_view question, const RewriteRuleSet& rules) {
  NormalizedQuestion out;
  out.original = std::string(question);

  auto switched = switch_pronouns_traced(question, rules);
  out.applied_rules = std::move(switched.rules);

  std::string text = std::move(switched.text);
  if (const auto pos = first_question_word(text, rules)) {
    const auto removed = trim(std::string_view(text).substr(0, *pos));
    if (!removed.empty()) {
      out.applied_rules.push_back("delete:" + removed);
      text.erase(0, *pos);
    }
  }

  if (rules.case_policy == CasePolicy::kCapitalizeFirst) {
    for (auto& c : text) {
      if (is_ascii_space(c)) continue;
      c = upper(c);
      break;
    }
  }
  out.normalized = std::move(text);
  return out;
}

}  // namespace essaymrc
