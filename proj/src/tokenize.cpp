#include "sieval/tokenize.hpp"

#include "sieval/errors.hpp"
#include "sieval/unicode.hpp"

namespace sieval {

std::string_view to_string(TokenizerMode mode) {
  return mode == TokenizerMode::kCjkChar ? "cjk-char" : "whitespace";
}

TokenizerMode parse_tokenizer_mode(std::string_view tag) {
  if (tag == "cjk-char") return TokenizerMode::kCjkChar;
  if (tag == "whitespace") return TokenizerMode::kWhitespace;
  throw InvalidArgument("unknown tokenizer mode '" + std::string(tag) +
                        "' (expected cjk-char or whitespace)");
}

namespace {

enum class CharClass { kSpace, kWord, kSingle };

CharClass classify(char32_t cp, TokenizerMode mode) {
  if (unicode::is_whitespace(cp)) return CharClass::kSpace;
  if (mode == TokenizerMode::kWhitespace) return CharClass::kWord;
  if (unicode::is_word_char(cp)) return CharClass::kWord;
  return CharClass::kSingle;  // CJK and punctuation: one codepoint each
}

}  // namespace

TokenSequence tokenize(std::string_view text, TokenizerMode mode) {
  TokenSequence out;
  out.mode = mode;
  std::string current;
  const auto flush = [&] {
    if (!current.empty()) out.tokens.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t pos = 0; pos < text.size();) {
    const unicode::DecodedChar c = unicode::decode_at(text, pos);
    pos += c.length;
    switch (classify(c.codepoint, mode)) {
      case CharClass::kSpace:
        flush();
        break;
      case CharClass::kWord:
        unicode::append_utf8(current, c.codepoint);
        break;
      case CharClass::kSingle:
        flush();
        unicode::append_utf8(current, c.codepoint);
        flush();
        break;
    }
  }
  flush();
  return out;
}

}  // namespace sieval
