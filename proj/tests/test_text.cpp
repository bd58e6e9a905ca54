#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "sieval/errors.hpp"
#include "sieval/metrics.hpp"
#include "sieval/tokenize.hpp"
#include "sieval/unicode.hpp"

using namespace sieval;
using Seq = std::vector<std::string>;

namespace {

std::size_t lcs_dp(const Seq& a, const Seq& b) {
  std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      t[i][j] = a[i - 1] == b[j - 1] ? t[i - 1][j - 1] + 1 : std::max(t[i - 1][j], t[i][j - 1]);
    }
  }
  return t[a.size()][b.size()];
}

// Longest subsequence of `a` (by subset enumeration) that is a subsequence of `b`.
std::size_t lcs_enumerate(const Seq& a, const Seq& b) {
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1u << a.size()); ++mask) {
    std::size_t j = 0, len = 0;
    bool ok = true;
    for (std::size_t i = 0; i < a.size() && ok; ++i) {
      if (!(mask >> i & 1u)) continue;
      while (j < b.size() && b[j] != a[i]) ++j;
      if (j == b.size()) ok = false;
      else { ++j; ++len; }
    }
    if (ok) best = std::max(best, len);
  }
  return best;
}

Seq random_seq(std::mt19937_64& rng, std::size_t max_len, int alphabet) {
  const std::size_t len = rng() % (max_len + 1);
  Seq s;
  for (std::size_t i = 0; i < len; ++i) s.push_back(std::string(1, static_cast<char>('a' + rng() % alphabet)));
  return s;
}

Seq tokens(std::string_view text, TokenizerMode mode = TokenizerMode::kCjkChar) {
  return tokenize(text, mode).tokens;
}

}  // namespace

TEST_CASE("utf-8 decoding replaces malformed bytes one at a time") {
  CHECK(unicode::decode_at("\xE4\xB8\xAD", 0).codepoint == U'中');
  CHECK(unicode::decode_at("\xE4\xB8\xAD", 0).length == 3);
  CHECK(unicode::decode_at("\xE4\xB8", 0).codepoint == unicode::kReplacementChar);
  CHECK(unicode::decode_at("\xE4\xB8", 0).length == 1);
  CHECK(unicode::decode_at("\xC0\x80", 0).codepoint == unicode::kReplacementChar);  // overlong
  CHECK(unicode::codepoint_count("a中b") == 3);
  CHECK(unicode::trim("\xE3\x80\x80 x \n") == "x");  // ideographic space
}

TEST_CASE("cjk-char mode splits ideographs and punctuation, keeps latin words") {
  CHECK(tokens("我愛NLP模型2024!") == Seq{"我", "愛", "NLP", "模", "型", "2024", "!"});
  CHECK(tokens("請輸出成 JSON，value 必須") == Seq{"請", "輸", "出", "成", "JSON", "，", "value", "必", "須"});
  CHECK(tokens("植物－纖維") == Seq{"植", "物", "－", "纖", "維"});
  CHECK(tokens("") .empty());
  CHECK(tokens(" \t\n").empty());
}

TEST_CASE("whitespace mode splits on unicode whitespace only") {
  CHECK(tokens("a  b\tc　中文", TokenizerMode::kWhitespace) == Seq{"a", "b", "c", "中文"});
  CHECK(tokens("x,y", TokenizerMode::kWhitespace) == Seq{"x,y"});
}

TEST_CASE("tokenizer mode tags round-trip") {
  CHECK(parse_tokenizer_mode("cjk-char") == TokenizerMode::kCjkChar);
  CHECK(parse_tokenizer_mode(to_string(TokenizerMode::kWhitespace)) == TokenizerMode::kWhitespace);
  CHECK_THROWS_AS(parse_tokenizer_mode("bpe"), InvalidArgument);
}

TEST_CASE("tokens are never empty and never contain whitespace") {
  std::mt19937_64 rng(11);
  const char* pieces[] = {"中", "a", "bc", " ", "\n", "，", "!", "\xE3\x80\x80", "é", "\xFF", "9"};
  for (int iter = 0; iter < 300; ++iter) {
    std::string text;
    for (int k = 0; k < 15; ++k) text += pieces[rng() % std::size(pieces)];
    for (auto mode : {TokenizerMode::kCjkChar, TokenizerMode::kWhitespace}) {
      for (const auto& t : tokens(text, mode)) {
        REQUIRE(!t.empty());
        for (std::size_t i = 0; i < t.size();) {
          const auto d = unicode::decode_at(t, i);
          REQUIRE(!unicode::is_whitespace(d.codepoint));
          i += d.length;
        }
      }
    }
  }
}

TEST_CASE("rouge-n hand values") {
  const Seq cand{"a", "b", "b"}, ref{"a", "b"};
  const auto r1 = rouge_n(cand, ref, 1);
  CHECK(r1.precision == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(r1.recall == 1.0);
  CHECK(r1.f1 == doctest::Approx(0.8).epsilon(1e-15));
  const auto r2 = rouge_n(cand, ref, 2);  // bigrams {ab, bb} vs {ab}
  CHECK(r2.precision == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(r2.recall == 1.0);
  CHECK_THROWS_AS(rouge_n(cand, ref, 0), InvalidArgument);
}

TEST_CASE("empty conventions") {
  const Seq empty, one{"a"};
  CHECK(rouge_n(empty, empty, 1).f1 == 1.0);
  CHECK(rouge_n(empty, one, 1).f1 == 0.0);
  CHECK(rouge_n(one, one, 2).f1 == 1.0);  // neither side has a bigram
  CHECK(rouge_l(empty, empty).f1 == 1.0);
  CHECK(rouge_l(one, empty).f1 == 0.0);
  CHECK(cosine_tf(empty, empty) == 1.0);
  CHECK(cosine_tf(empty, one) == 0.0);
}

TEST_CASE("rouge-l hand value") {
  const Seq a{"a", "b", "c", "d"}, b{"a", "c", "d", "e"};
  CHECK(lcs_length(a, b) == 3);
  CHECK(rouge_l(a, b).f1 == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("identity scores exactly one") {
  const Seq s = tokens("植物基飲食－可以降低－心臟病風險 and more words");
  CHECK(rouge_n(s, s, 1).f1 == 1.0);
  CHECK(rouge_n(s, s, 2).f1 == 1.0);
  CHECK(rouge_l(s, s).f1 == 1.0);
  CHECK(cosine_tf(s, s) == 1.0);
}

TEST_CASE("cosine hand value") {
  CHECK(cosine_tf(Seq{"a", "a", "b"}, Seq{"a", "b", "b"}) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(cosine_tf(Seq{"a"}, Seq{"b"}) == 0.0);
}

TEST_CASE("lcs matches dp on long inputs across word boundaries") {
  std::mt19937_64 rng(5);
  for (int iter = 0; iter < 40; ++iter) {
    const Seq a = random_seq(rng, 300, 4), b = random_seq(rng, 300, 4);
    REQUIRE(lcs_length(a, b) == lcs_dp(a, b));
  }
}

TEST_CASE("lcs matches exhaustive enumeration on short inputs") {
  std::mt19937_64 rng(7);
  for (int iter = 0; iter < 300; ++iter) {
    const Seq a = random_seq(rng, 10, 3), b = random_seq(rng, 12, 3);
    REQUIRE(lcs_length(a, b) == lcs_enumerate(a, b));
  }
}

TEST_CASE("metric properties") {
  std::mt19937_64 rng(13);
  for (int iter = 0; iter < 500; ++iter) {
    const Seq a = random_seq(rng, 20, 5), b = random_seq(rng, 20, 5);
    const auto ab = rouge_l(a, b), ba = rouge_l(b, a);
    REQUIRE(ab.f1 == doctest::Approx(ba.f1).epsilon(1e-15));
    REQUIRE(ab.precision == doctest::Approx(ba.recall).epsilon(1e-15));
    REQUIRE(lcs_length(a, b) <= std::min(a.size(), b.size()));
    for (double v : {ab.f1, rouge_n(a, b, 1).f1, rouge_n(a, b, 2).f1, cosine_tf(a, b)}) {
      REQUIRE(v >= 0.0);
      REQUIRE(v <= 1.0);
    }
    REQUIRE(cosine_tf(a, b) == doctest::Approx(cosine_tf(b, a)).epsilon(1e-15));
    // every common subsequence is built from shared unigrams
    REQUIRE(rouge_l(a, b).f1 <= rouge_n(a, b, 1).f1 + 1e-12);
  }
}

TEST_CASE("dense cosine") {
  const std::vector<double> x{1, 2, 3}, y{2, 4, 6}, z{-1, -2, -3}, zero{0, 0, 0};
  CHECK(cosine_dense(x, y) == doctest::Approx(1.0));
  CHECK(cosine_dense(x, z) == doctest::Approx(-1.0));
  CHECK(cosine_dense(zero, zero) == 1.0);
  CHECK(cosine_dense(x, zero) == 0.0);
  CHECK_THROWS_AS(cosine_dense(x, std::vector<double>{1, 2}), InvalidArgument);
}
