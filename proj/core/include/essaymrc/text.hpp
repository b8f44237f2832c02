// Small text helpers shared by the rule engine, tokenizer and metrics.
// All offsets are byte offsets into UTF-8 text unless stated otherwise.
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace essaymrc {

/// A surface word with its byte range in the source text.
struct WordSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

bool is_ascii_space(char c);
bool is_ascii_punct(char c);

/// Splits on whitespace; every ASCII punctuation character becomes its own
/// word. Non-ASCII bytes are treated as word characters.
std::vector<WordSpan> split_words(std::string_view text);

/// Lowercased surface forms of split_words(text).
std::vector<std::string> word_strings(std::string_view text);

std::string to_lower_ascii(std::string_view text);
std::string trim(std::string_view text);

/// Number of Unicode code points in well-formed UTF-8.
std::size_t utf8_length(std::string_view text);
/// Byte offset of the code point with index `cp`; returns npos when past the end.
std::size_t utf8_byte_offset(std::string_view text, std::size_t cp);
/// Code point index of a byte offset that lies on a code point boundary.
std::size_t utf8_codepoint_index(std::string_view text, std::size_t byte);
bool is_utf8_continuation(char c);

std::string read_file(const std::string& path);
std::vector<std::string> read_lines(const std::string& path);

}  // namespace essaymrc
