#include "essaymrc/text.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace essaymrc {

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_ascii_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (u >= 33 && u <= 47) || (u >= 58 && u <= 64) || (u >= 91 && u <= 96) ||
         (u >= 123 && u <= 126);
}

bool is_utf8_continuation(char c) {
  return (static_cast<unsigned char>(c) & 0xC0) == 0x80;
}

std::vector<WordSpan> split_words(std::string_view text) {
  std::vector<WordSpan> words;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (is_ascii_space(c)) {
      ++i;
    } else if (is_ascii_punct(c)) {
      words.push_back({i, i + 1});
      ++i;
    } else {
      const std::size_t begin = i;
      while (i < text.size() && !is_ascii_space(text[i]) && !is_ascii_punct(text[i])) ++i;
      words.push_back({begin, i});
    }
  }
  return words;
}

std::vector<std::string> word_strings(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& w : split_words(text)) {
    out.push_back(to_lower_ascii(text.substr(w.begin, w.end - w.begin)));
  }
  return out;
}

std::string to_lower_ascii(std::string_view text) {
  std::string out(text);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string trim(std::string_view text) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && is_ascii_space(text[b])) ++b;
  while (e > b && is_ascii_space(text[e - 1])) --e;
  return std::string(text.substr(b, e - b));
}

std::size_t utf8_length(std::string_view text) {
  std::size_t n = 0;
  for (char c : text) {
    if (!is_utf8_continuation(c)) ++n;
  }
  return n;
}

std::size_t utf8_byte_offset(std::string_view text, std::size_t cp) {
  std::size_t seen = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (is_utf8_continuation(text[i])) continue;
    if (seen == cp) return i;
    ++seen;
  }
  return seen == cp ? text.size() : std::string_view::npos;
}

std::size_t utf8_codepoint_index(std::string_view text, std::size_t byte) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (!is_utf8_continuation(text[i])) ++n;
  }
  return n;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

}  // namespace essaymrc
