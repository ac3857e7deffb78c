#include "gamesum/text.hpp"

#include <array>

namespace gamesum::text {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

// Appends the code point starting at byte i, returns bytes consumed.
std::size_t decode_one(std::string_view s, std::size_t i, char32_t& out) {
  const unsigned char b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    out = b0;
    return 1;
  }
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    out = kReplacement;
    return 1;
  }
  if (i + len > s.size()) {
    out = kReplacement;
    return 1;
  }
  for (std::size_t k = 1; k < len; ++k) {
    const unsigned char b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) {
      out = kReplacement;
      return 1;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  // Reject overlong encodings and surrogates.
  if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
      (len == 4 && cp < 0x10000) || (cp >= 0xD800 && cp <= 0xDFFF) ||
      cp > 0x10FFFF) {
    out = kReplacement;
    return 1;
  }
  out = cp;
  return len;
}

}  // namespace

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    char32_t cp = 0;
    i += decode_one(s, i, cp);
    out.push_back(cp);
  }
  return out;
}

std::string encode_utf8(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
  return out;
}

std::string encode_utf8(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) out += encode_utf8(cp);
  return out;
}

bool is_space(char32_t cp) {
  return cp == U' ' || (cp >= 0x09 && cp <= 0x0D) || cp == 0xA0 ||
         (cp >= 0x2000 && cp <= 0x200B) || cp == 0x3000;
}

bool is_punct(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= '!' && cp <= '/') || (cp >= ':' && cp <= '@') ||
           (cp >= '[' && cp <= '`') || (cp >= '{' && cp <= '~');
  }
  return (cp >= 0x2010 && cp <= 0x2027) ||   // dashes, quotes, ellipsis
         cp == 0x00B7 || cp == 0x00A1 || cp == 0x00BF ||
         (cp >= 0x3001 && cp <= 0x303F) ||   // CJK punctuation
         (cp >= 0xFF01 && cp <= 0xFF0F) ||   // fullwidth forms
         (cp >= 0xFF1A && cp <= 0xFF20) ||
         (cp >= 0xFF3B && cp <= 0xFF40) ||
         (cp >= 0xFF5B && cp <= 0xFF65);
}

bool is_cjk(char32_t cp) {
  return (cp >= 0x4E00 && cp <= 0x9FFF) || (cp >= 0x3400 && cp <= 0x4DBF) ||
         (cp >= 0xF900 && cp <= 0xFAFF);
}

std::size_t char_length(std::string_view s) { return decode_utf8(s).size(); }

std::string substr_chars(std::string_view s, std::size_t begin, std::size_t end) {
  const std::u32string cps = decode_utf8(s);
  if (begin > cps.size()) begin = cps.size();
  if (end > cps.size()) end = cps.size();
  if (begin >= end) return {};
  return encode_utf8(std::u32string_view(cps).substr(begin, end - begin));
}

std::size_t char_to_byte(std::string_view s, std::size_t char_offset) {
  std::size_t i = 0;
  std::size_t chars = 0;
  while (i < s.size() && chars < char_offset) {
    char32_t cp = 0;
    i += decode_one(s, i, cp);
    ++chars;
  }
  return i;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::vector<Token> word_tokens(std::string_view s) {
  const std::u32string cps = decode_utf8(s);
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < cps.size()) {
    const char32_t cp = cps[i];
    if (is_space(cp) || is_punct(cp)) {
      ++i;
      continue;
    }
    if (is_cjk(cp)) {
      out.push_back({encode_utf8(cp), i, i + 1});
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < cps.size() && !is_space(cps[j]) && !is_punct(cps[j]) &&
           !is_cjk(cps[j])) {
      ++j;
    }
    out.push_back({encode_utf8(std::u32string_view(cps).substr(i, j - i)), i, j});
    i = j;
  }
  return out;
}

std::vector<Token> char_tokens(std::string_view s) {
  const std::u32string cps = decode_utf8(s);
  std::vector<Token> out;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (is_space(cps[i])) continue;
    out.push_back({encode_utf8(cps[i]), i, i + 1});
  }
  return out;
}

std::vector<std::string> token_strings(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const Token& t : tokens) out.push_back(t.token);
  return out;
}

std::vector<std::string> word_token_strings(std::string_view s) {
  return token_strings(word_tokens(s));
}

std::vector<std::string> char_token_strings(std::string_view s) {
  return token_strings(char_tokens(s));
}

std::string trim(std::string_view s) {
  const std::u32string cps = decode_utf8(s);
  std::size_t b = 0;
  std::size_t e = cps.size();
  while (b < e && is_space(cps[b])) ++b;
  while (e > b && is_space(cps[e - 1])) --e;
  return encode_utf8(std::u32string_view(cps).substr(b, e - b));
}

}  // namespace gamesum::text
