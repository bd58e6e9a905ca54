#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace sieval {

enum class TestMethod { kTwoPropZ, kPairedT, kWilcoxon, kBootstrap };

// "two-prop-z" | "paired-t" | "wilcoxon" | "bootstrap"
std::string_view to_string(TestMethod method);
TestMethod parse_test_method(std::string_view tag);

inline constexpr double kDefaultAlpha = 0.05;

struct SignificanceResult {
  TestMethod method = TestMethod::kPairedT;
  double statistic = 0.0;
  // Linear p-value; 0 when it underflows the normal binary64 range. log10_p
  // always carries the exact magnitude.
  double p_two_tailed = 1.0;
  double log10_p = 0.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  double alpha = kDefaultAlpha;
  bool significant = false;  // p_two_tailed < alpha
  // Zero-variance input (identical samples, constant differences, pooled
  // proportion of 0 or 1): reported with p = 1.
  bool degenerate = false;
};

// Builds a result from a log10 p-value, filling the linear p and verdict.
SignificanceResult make_significance(TestMethod method, double statistic, double log10_p,
                                     std::size_t n1, std::size_t n2, double alpha,
                                     bool degenerate = false);

struct TwoPropOptions {
  double alpha = kDefaultAlpha;
  bool continuity_correction = false;
};

// Pooled two-proportion z-test of k1/n1 against k2/n2. Throws InvalidArgument
// unless 0 <= k <= n and n > 0 on both sides.
SignificanceResult two_prop_z(std::int64_t k1, std::int64_t n1, std::int64_t k2, std::int64_t n2,
                              const TwoPropOptions& options = {});

struct PairedOptions {
  double alpha = kDefaultAlpha;
  std::size_t resamples = 10000;   // bootstrap only
  std::uint64_t seed = 20240917;   // bootstrap only
  std::size_t jobs = 1;            // bootstrap worker threads; result is independent of it
};

// Paired test on aligned per-example scores. Throws InvalidArgument on a
// length mismatch, fewer than two pairs, or method == kTwoPropZ.
SignificanceResult paired_test(std::span<const double> scores_a, std::span<const double> scores_b,
                               TestMethod method, const PairedOptions& options = {});

}  // namespace sieval
