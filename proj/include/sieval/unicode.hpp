#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace sieval::unicode {

inline constexpr char32_t kReplacementChar = U'�';

struct DecodedChar {
  char32_t codepoint;
  std::size_t length;  // bytes consumed, always >= 1
};

// Decodes the UTF-8 sequence starting at `pos`. Malformed, overlong or
// truncated sequences decode to U+FFFD consuming a single byte.
DecodedChar decode_at(std::string_view text, std::size_t pos);

void append_utf8(std::string& out, char32_t codepoint);

bool is_whitespace(char32_t cp);
// Han ideographs, kana, hangul syllables, bopomofo and CJK compatibility
// ideographs.
bool is_cjk(char32_t cp);
// Letters and digits of Latin-script and other alphabetic blocks that are
// tokenized as whole words (ASCII, Latin-1/Extended, Greek, Cyrillic and
// the full-width forms of ASCII letters and digits).
bool is_word_char(char32_t cp);

// Strips leading and trailing unicode whitespace.
std::string_view trim(std::string_view text);

std::size_t codepoint_count(std::string_view text);

}  // namespace sieval::unicode
