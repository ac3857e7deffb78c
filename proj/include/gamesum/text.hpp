#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace gamesum::text {

// All offsets in this toolkit are unicode scalar ("character") offsets, not
// byte offsets, so that spans make sense for Chinese text.

std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view cps);
std::string encode_utf8(char32_t cp);

bool is_space(char32_t cp);
bool is_punct(char32_t cp);
bool is_cjk(char32_t cp);

std::size_t char_length(std::string_view s);
std::string substr_chars(std::string_view s, std::size_t begin, std::size_t end);
// Byte offset of the given character offset (s.size() when past the end).
std::size_t char_to_byte(std::string_view s, std::size_t char_offset);
std::string ascii_lower(std::string_view s);

struct Token {
  std::string token;
  std::size_t begin = 0;  // character offsets into the source string
  std::size_t end = 0;
};

// Word-level tokens: contiguous alphanumeric runs form one token, every CJK
// ideograph is its own token, whitespace and punctuation split and are
// dropped.
std::vector<Token> word_tokens(std::string_view s);

// One token per non-space character (punctuation included). The usual
// granularity for Chinese overlap metrics.
std::vector<Token> char_tokens(std::string_view s);

std::vector<std::string> token_strings(const std::vector<Token>& tokens);
std::vector<std::string> word_token_strings(std::string_view s);
std::vector<std::string> char_token_strings(std::string_view s);

std::string trim(std::string_view s);

}  // namespace gamesum::text
