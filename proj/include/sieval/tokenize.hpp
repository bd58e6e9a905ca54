#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sieval {

enum class TokenizerMode {
  kCjkChar,     // one token per CJK codepoint and per punctuation mark, word runs otherwise
  kWhitespace,  // split on unicode whitespace only
};

std::string_view to_string(TokenizerMode mode);
TokenizerMode parse_tokenizer_mode(std::string_view tag);

struct TokenSequence {
  std::vector<std::string> tokens;
  TokenizerMode mode = TokenizerMode::kCjkChar;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
};

// Deterministic and total: never throws, empty text gives an empty sequence.
// No emitted token is empty or contains whitespace.
TokenSequence tokenize(std::string_view text, TokenizerMode mode);

}  // namespace sieval
