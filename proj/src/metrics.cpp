#include "sieval/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sieval/errors.hpp"

namespace sieval {

OverlapScore make_overlap(double precision, double recall) {
  const double sum = precision + recall;
  return {precision, recall, sum > 0.0 ? 2.0 * precision * recall / sum : 0.0};
}

namespace {

std::string ngram_key(Tokens tokens, std::size_t start, std::size_t n) {
  std::string key;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) key.push_back('\x1f');  // cannot occur inside a token
    key += tokens[start + i];
  }
  return key;
}

std::unordered_map<std::string, std::size_t> ngram_counts(Tokens tokens, std::size_t n) {
  std::unordered_map<std::string, std::size_t> counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) ++counts[ngram_key(tokens, i, n)];
  return counts;
}

OverlapScore ratio_score(std::size_t overlap, std::size_t candidate_total,
                         std::size_t reference_total) {
  if (candidate_total == 0 && reference_total == 0) return {1.0, 1.0, 1.0};
  if (candidate_total == 0 || reference_total == 0) return {0.0, 0.0, 0.0};
  return make_overlap(static_cast<double>(overlap) / static_cast<double>(candidate_total),
                      static_cast<double>(overlap) / static_cast<double>(reference_total));
}

}  // namespace

OverlapScore rouge_n(Tokens candidate, Tokens reference, int n) {
  if (n < 1) throw InvalidArgument("rouge_n: n must be >= 1");
  const auto un = static_cast<std::size_t>(n);
  const std::size_t cand_total = candidate.size() >= un ? candidate.size() - un + 1 : 0;
  const std::size_t ref_total = reference.size() >= un ? reference.size() - un + 1 : 0;
  const auto cand_counts = ngram_counts(candidate, un);
  const auto ref_counts = ngram_counts(reference, un);
  std::size_t overlap = 0;
  for (const auto& [gram, count] : cand_counts) {
    if (auto it = ref_counts.find(gram); it != ref_counts.end()) overlap += std::min(count, it->second);
  }
  return ratio_score(overlap, cand_total, ref_total);
}

OverlapScore rouge_n(const TokenSequence& candidate, const TokenSequence& reference, int n) {
  return rouge_n(Tokens(candidate.tokens), Tokens(reference.tokens), n);
}

std::size_t lcs_length(Tokens a, Tokens b) {
  if (a.empty() || b.empty()) return 0;
  // Hyyrö's bit-vector LCS: columns of the DP table over `b` packed in words.
  const std::size_t m = b.size();
  const std::size_t words = (m + 63) / 64;
  std::unordered_map<std::string_view, std::vector<std::uint64_t>> match;
  for (std::size_t j = 0; j < m; ++j) {
    auto& mask = match[b[j]];
    if (mask.empty()) mask.assign(words, 0);
    mask[j / 64] |= std::uint64_t{1} << (j % 64);
  }
  std::vector<std::uint64_t> v(words, ~std::uint64_t{0});
  for (const std::string& token : a) {
    auto it = match.find(token);
    if (it == match.end()) continue;
    const std::vector<std::uint64_t>& pm = it->second;
    std::uint64_t carry = 0;
    std::uint64_t borrow = 0;
    for (std::size_t w = 0; w < words; ++w) {
      const std::uint64_t u = v[w] & pm[w];
      const std::uint64_t sum = v[w] + u;
      const std::uint64_t sum_c = sum + carry;
      carry = static_cast<std::uint64_t>(sum < v[w]) | static_cast<std::uint64_t>(sum_c < sum);
      const std::uint64_t diff = v[w] - u;
      const std::uint64_t diff_b = diff - borrow;
      borrow = static_cast<std::uint64_t>(v[w] < u) | static_cast<std::uint64_t>(diff < borrow);
      v[w] = sum_c | diff_b;
    }
  }
  std::size_t ones = 0;
  for (std::size_t w = 0; w < words; ++w) {
    std::uint64_t word = v[w];
    if (w + 1 == words && m % 64 != 0) word &= (std::uint64_t{1} << (m % 64)) - 1;
    ones += static_cast<std::size_t>(std::popcount(word));
  }
  return m - ones;
}

OverlapScore rouge_l(Tokens candidate, Tokens reference) {
  if (candidate.empty() && reference.empty()) return {1.0, 1.0, 1.0};
  if (candidate.empty() || reference.empty()) return {0.0, 0.0, 0.0};
  return ratio_score(lcs_length(candidate, reference), candidate.size(), reference.size());
}

OverlapScore rouge_l(const TokenSequence& candidate, const TokenSequence& reference) {
  return rouge_l(Tokens(candidate.tokens), Tokens(reference.tokens));
}

double cosine_tf(Tokens candidate, Tokens reference) {
  if (candidate.empty() && reference.empty()) return 1.0;
  if (candidate.empty() || reference.empty()) return 0.0;
  // Ordered map keeps the accumulation order fixed.
  std::map<std::string_view, std::pair<std::uint64_t, std::uint64_t>> tf;
  for (const auto& t : candidate) ++tf[t].first;
  for (const auto& t : reference) ++tf[t].second;
  std::uint64_t dot = 0;
  std::uint64_t norm_c = 0;
  std::uint64_t norm_r = 0;
  for (const auto& [token, counts] : tf) {
    dot += counts.first * counts.second;
    norm_c += counts.first * counts.first;
    norm_r += counts.second * counts.second;
  }
  // Integer norms make cosine(a, a) exactly 1.
  const double denom = std::sqrt(static_cast<double>(norm_c) * static_cast<double>(norm_r));
  return std::clamp(static_cast<double>(dot) / denom, 0.0, 1.0);
}

double cosine_tf(const TokenSequence& candidate, const TokenSequence& reference) {
  return cosine_tf(Tokens(candidate.tokens), Tokens(reference.tokens));
}

double cosine_dense(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("cosine_dense: dimension mismatch");
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 && nb == 0.0) return 1.0;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

}  // namespace sieval
