#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "sieval/tokenize.hpp"

namespace sieval {

// f1 = 2PR/(P+R), or 0 when P+R = 0.
struct OverlapScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

OverlapScore make_overlap(double precision, double recall);

using Tokens = std::span<const std::string>;

// Clipped n-gram overlap. Both sides without n-grams scores 1, exactly one
// side without n-grams scores 0. Throws InvalidArgument when n < 1.
OverlapScore rouge_n(Tokens candidate, Tokens reference, int n);
OverlapScore rouge_n(const TokenSequence& candidate, const TokenSequence& reference, int n);

// Length of the longest common subsequence (bit-parallel, O(|a||b|/64)).
std::size_t lcs_length(Tokens a, Tokens b);

OverlapScore rouge_l(Tokens candidate, Tokens reference);
OverlapScore rouge_l(const TokenSequence& candidate, const TokenSequence& reference);

// Cosine of term-frequency vectors, in [0,1]. Both empty -> 1, one empty -> 0.
double cosine_tf(Tokens candidate, Tokens reference);
double cosine_tf(const TokenSequence& candidate, const TokenSequence& reference);

// Cosine of two dense vectors (externally supplied embeddings). Throws
// InvalidArgument on a dimension mismatch; zero vectors follow the same
// empty conventions as cosine_tf.
double cosine_dense(std::span<const double> a, std::span<const double> b);

}  // namespace sieval
