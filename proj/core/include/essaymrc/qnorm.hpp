// Question normalization: rewrites a task-requirement question from the
// examiner's perspective to the examinee's by switching personal pronouns and
// deleting the words that precede the first interrogative word.
#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace essaymrc {

enum class CasePolicy { kPreserve, kCapitalizeFirst };

struct RewriteRuleSet {
  /// (source, replacement); sources are matched as whole words, case-insensitively.
  std::vector<std::pair<std::string, std::string>> pronoun_map;
  std::vector<std::string> question_words;
  CasePolicy case_policy = CasePolicy::kCapitalizeFirst;

  /// Throws ConfigError on duplicate pronoun keys or an empty question-word list.
  void validate() const;
};

struct NormalizedQuestion {
  std::string original;
  std::string normalized;
  /// Rule identifiers in application order, e.g. "pronoun:you->I", "delete:explain".
  std::vector<std::string> applied_rules;
};

RewriteRuleSet default_rules();

/// Parses the two-section rule file format:
///
///   # comment
///   [pronouns]
///   you I
///   your my
///   [question_words]
///   what
///   how
///
/// Blank lines and lines starting with '#' are ignored. Pronoun entries are
/// exactly two whitespace-separated words; question words are one word per line.
RewriteRuleSet parse_rules(std::string_view text, CasePolicy policy = CasePolicy::kCapitalizeFirst);
RewriteRuleSet load_rules(const std::string& path, CasePolicy policy = CasePolicy::kCapitalizeFirst);
std::string format_rules(const RewriteRuleSet& rules);

std::string switch_pronouns(std::string_view question, const RewriteRuleSet& rules);
std::string delete_redundant(std::string_view question, const RewriteRuleSet& rules);
NormalizedQuestion normalize(std::string_view question, const RewriteRuleSet& rules);

CasePolicy parse_case_policy(std::string_view name);

}  // namespace essaymrc
