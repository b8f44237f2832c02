// Tokenization and assembly of the reading-comprehension input
//   T = ([CLS], question tokens, [SEP], essay tokens)
// Positions in T are 1-indexed: position 1 is [CLS], positions 2..m+1 are the
// question, m+2 is [SEP] and m+3..tau are essay tokens.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "essaymrc/qnorm.hpp"

namespace essaymrc {

using TokenId = std::int32_t;

/// Term list with the reserved symbols on the first four lines:
/// [PAD]=0, [UNK]=1, [CLS]=2, [SEP]=3. Word-continuation pieces carry a "##" prefix.
class Vocabulary {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kUnk = 1;
  static constexpr TokenId kCls = 2;
  static constexpr TokenId kSep = 3;
  static constexpr std::string_view kContinuation = "##";

  Vocabulary();
  /// Throws ParseError unless terms start with the reserved symbols and contain no duplicates.
  explicit Vocabulary(std::vector<std::string> terms);

  static Vocabulary load(const std::string& path);
  void save(const std::string& path) const;

  std::size_t size() const { return terms_.size(); }
  std::optional<TokenId> find(std::string_view term) const;
  const std::string& term(TokenId id) const { return terms_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& terms() const { return terms_; }
  /// FNV-1a over all terms; stored in checkpoints to detect mismatched vocabularies.
  std::uint64_t fingerprint() const;

 private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, TokenId> index_;
};

/// Frequency-based vocabulary: reserved symbols, then every observed character
/// (as a word-initial piece and as a continuation piece), then whole words by
/// descending frequency (ties alphabetical) until `size` terms exist.
Vocabulary build_vocabulary(const std::vector<std::string>& texts, std::size_t size);

struct Token {
  TokenId id = Vocabulary::kUnk;
  std::string surface;
  /// Byte offsets into the source text; absent for special symbols.
  std::optional<std::size_t> char_start;
  std::optional<std::size_t> char_end;

  bool is_special() const { return !char_start.has_value(); }
};

/// Lowercased whitespace/punctuation split followed by greedy longest-match
/// subword segmentation. A word that cannot be fully segmented becomes one [UNK].
std::vector<Token> tokenize(std::string_view text, const Vocabulary& vocab);

struct InputSequence {
  std::vector<Token> tokens;
  std::size_t m = 0;    ///< question token count
  std::size_t n = 0;    ///< essay token count after truncation
  std::size_t tau = 0;  ///< m + n + 2
  bool truncated = false;

  /// 1-indexed access into T.
  const Token& at(std::size_t position) const { return tokens.at(position - 1); }
  std::size_t first_essay_position() const { return m + 3; }
  bool in_essay(std::size_t position) const { return position >= m + 3 && position <= tau; }
  std::vector<TokenId> ids() const;
};

inline constexpr std::size_t kDefaultMaxLength = 512;

/// Throws ValidationError on an empty question or essay, or when the question
/// alone leaves no room for an essay token (m + 2 >= max_len).
InputSequence assemble(const NormalizedQuestion& q, std::string_view essay, const Vocabulary& vocab,
                       std::size_t max_len = kDefaultMaxLength);

/// Assembly from pre-tokenized parts; the building block used by assemble.
InputSequence assemble_tokens(std::vector<Token> question, std::vector<Token> essay,
                              std::size_t max_len = kDefaultMaxLength);

}  // namespace essaymrc
