#include "essaymrc/seqbuild.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "essaymrc/errors.hpp"
#include "essaymrc/text.hpp"

namespace essaymrc {
namespace {

const std::vector<std::string>& reserved_terms() {
  static const std::vector<std::string> terms = {"[PAD]", "[UNK]", "[CLS]", "[SEP]"};
  return terms;
}

Token special(TokenId id, const std::string& surface) {
  Token t;
  t.id = id;
  t.surface = surface;
  return t;
}

}  // namespace

Vocabulary::Vocabulary() : Vocabulary(reserved_terms()) {}

Vocabulary::Vocabulary(std::vector<std::string> terms) : terms_(std::move(terms)) {
  const auto& reserved = reserved_terms();
  if (terms_.size() < reserved.size() || !std::equal(reserved.begin(), reserved.end(), terms_.begin())) {
    throw ParseError("vocabulary must start with [PAD], [UNK], [CLS], [SEP]");
  }
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].empty()) throw ParseError("empty vocabulary term at line " + std::to_string(i + 1));
    if (!index_.emplace(terms_[i], static_cast<TokenId>(i)).second) {
      throw ParseError("duplicate vocabulary term '" + terms_[i] + "' at line " + std::to_string(i + 1));
    }
  }
}

Vocabulary Vocabulary::load(const std::string& path) {
  auto lines = read_lines(path);
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return Vocabulary(std::move(lines));
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write vocabulary: " + path);
  for (const auto& t : terms_) out << t << '\n';
}

std::optional<TokenId> Vocabulary::find(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t Vocabulary::fingerprint() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& t : terms_) {
    for (unsigned char c : t) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    h ^= 0x0A;
    h *= 1099511628211ULL;
  }
  return h;
}

Vocabulary build_vocabulary(const std::vector<std::string>& texts, std::size_t size) {
  std::map<std::string, std::size_t> word_freq;
  std::set<std::string> chars;
  for (const auto& text : texts) {
    for (const auto& w : word_strings(text)) {
      ++word_freq[w];
      for (std::size_t i = 0; i < w.size();) {
        std::size_t j = i + 1;
        while (j < w.size() && is_utf8_continuation(w[j])) ++j;
        chars.insert(w.substr(i, j - i));
        i = j;
      }
    }
  }

  std::vector<std::string> terms = reserved_terms();
  std::set<std::string> present(terms.begin(), terms.end());
  auto add = [&](const std::string& t) {
    if (terms.size() < size && present.insert(t).second) terms.push_back(t);
  };
  for (const auto& c : chars) add(c);
  for (const auto& c : chars) add(std::string(Vocabulary::kContinuation) + c);

  std::vector<std::pair<std::string, std::size_t>> ranked(word_freq.begin(), word_freq.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  for (const auto& [w, _] : ranked) add(w);
  return Vocabulary(std::move(terms));
}

std::vector<Token> tokenize(std::string_view text, const Vocabulary& vocab) {
  std::vector<Token> out;
  const std::string lowered = to_lower_ascii(text);
  for (const auto& w : split_words(text)) {
    const std::string_view word(lowered.data() + w.begin, w.end - w.begin);
    std::vector<Token> pieces;
    bool failed = false;
    std::size_t start = 0;
    while (start < word.size()) {
      std::optional<TokenId> hit;
      std::size_t end = word.size();
      for (; end > start; --end) {
        if (end < word.size() && is_utf8_continuation(word[end])) continue;
        std::string piece(word.substr(start, end - start));
        if (start > 0) piece.insert(0, Vocabulary::kContinuation);
        if ((hit = vocab.find(piece))) break;
      }
      if (!hit) {
        failed = true;
        break;
      }
      Token t;
      t.id = *hit;
      t.char_start = w.begin + start;
      t.char_end = w.begin + end;
      t.surface = std::string(text.substr(*t.char_start, end - start));
      pieces.push_back(std::move(t));
      start = end;
    }
    if (failed) {
      Token unk;
      unk.id = Vocabulary::kUnk;
      unk.char_start = w.begin;
      unk.char_end = w.end;
      unk.surface = std::string(text.substr(w.begin, w.end - w.begin));
      out.push_back(std::move(unk));
    } else {
      for (auto& p : pieces) out.push_back(std::move(p));
    }
  }
  return out;
}

std::vector<TokenId> InputSequence::ids() const {
  std::vector<TokenId> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.id);
  return out;
}

InputSequence assemble_tokens(std::vector<Token> question, std::vector<Token> essay, std::size_t max_len) {
  const std::size_t m = question.size();
  if (m + 2 >= max_len) {
    throw ValidationError("question of " + std::to_string(m) + " tokens leaves no room for the essay (max length " +
                          std::to_string(max_len) + ")");
  }
  InputSequence seq;
  seq.m = m;
  const std::size_t budget = max_len - m - 2;
  seq.truncated = essay.size() > budget;
  if (seq.truncated) essay.resize(budget);
  seq.n = essay.size();
  seq.tau = seq.m + seq.n + 2;

  seq.tokens.reserve(seq.tau);
  seq.tokens.push_back(special(Vocabulary::kCls, "[CLS]"));
  for (auto& t : question) seq.tokens.push_back(std::move(t));
  seq.tokens.push_back(special(Vocabulary::kSep, "[SEP]"));
  for (auto& t : essay) seq.tokens.push_back(std::move(t));
  return seq;
}

InputSequence assemble(const NormalizedQuestion& q, std::string_view essay, const Vocabulary& vocab,
                       std::size_t max_len) {
  if (trim(q.normalized).empty()) throw ValidationError("empty question");
  if (trim(essay).empty()) throw ValidationError("empty essay");
  return assemble_tokens(tokenize(q.normalized, vocab), tokenize(essay, vocab), max_len);
}

}  // namespace essaymrc
