#include "sieval/significance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "sieval/errors.hpp"
#include "sieval/rng.hpp"
#include "sieval/special_functions.hpp"

namespace sieval {

std::string_view to_string(TestMethod method) {
  switch (method) {
    case TestMethod::kTwoPropZ: return "two-prop-z";
    case TestMethod::kPairedT: return "paired-t";
    case TestMethod::kWilcoxon: return "wilcoxon";
    case TestMethod::kBootstrap: return "bootstrap";
  }
  return "unknown";
}

TestMethod parse_test_method(std::string_view tag) {
  for (TestMethod m : {TestMethod::kTwoPropZ, TestMethod::kPairedT, TestMethod::kWilcoxon,
                       TestMethod::kBootstrap}) {
    if (to_string(m) == tag) return m;
  }
  throw InvalidArgument("unknown test method '" + std::string(tag) +
                        "' (expected two-prop-z, paired-t, wilcoxon or bootstrap)");
}

SignificanceResult make_significance(TestMethod method, double statistic, double log10_p,
                                     std::size_t n1, std::size_t n2, double alpha,
                                     bool degenerate) {
  SignificanceResult r;
  r.method = method;
  r.statistic = statistic;
  r.log10_p = std::min(log10_p, 0.0);
  // Below ~1e-307 the linear value is subnormal or zero; report 0 there.
  r.p_two_tailed = r.log10_p > -307.0 ? std::pow(10.0, r.log10_p) : 0.0;
  r.n1 = n1;
  r.n2 = n2;
  r.alpha = alpha;
  r.significant = r.p_two_tailed < alpha;
  r.degenerate = degenerate;
  return r;
}

SignificanceResult two_prop_z(std::int64_t k1, std::int64_t n1, std::int64_t k2, std::int64_t n2,
                              const TwoPropOptions& options) {
  if (n1 <= 0 || n2 <= 0 || k1 < 0 || k2 < 0 || k1 > n1 || k2 > n2) {
    throw InvalidArgument("two_prop_z: require 0 <= k <= n and n > 0 (got " + std::to_string(k1) +
                          "/" + std::to_string(n1) + " vs " + std::to_string(k2) + "/" +
                          std::to_string(n2) + ")");
  }
  const auto un1 = static_cast<std::size_t>(n1);
  const auto un2 = static_cast<std::size_t>(n2);
  if (k1 + k2 == 0 || k1 + k2 == n1 + n2) {
    return make_significance(TestMethod::kTwoPropZ, 0.0, 0.0, un1, un2, options.alpha, true);
  }
  const double p1 = static_cast<double>(k1) / static_cast<double>(n1);
  const double p2 = static_cast<double>(k2) / static_cast<double>(n2);
  const double pooled = static_cast<double>(k1 + k2) / static_cast<double>(n1 + n2);
  const double inv_n = 1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2);
  const double se = std::sqrt(pooled * (1.0 - pooled) * inv_n);
  double diff = p1 - p2;
  if (options.continuity_correction) {
    const double shrunk = std::max(0.0, std::fabs(diff) - 0.5 * inv_n);
    diff = std::copysign(shrunk, diff);
  }
  const double z = diff / se;
  return make_significance(TestMethod::kTwoPropZ, z, special::log10_normal_two_tailed(z), un1, un2,
                           options.alpha);
}

namespace {

struct Moments {
  double mean;
  double sd;
  double max_abs;
};

Moments moments(std::span<const double> d) {
  const double n = static_cast<double>(d.size());
  double sum = 0.0;
  double max_abs = 0.0;
  for (double x : d) {
    sum += x;
    max_abs = std::max(max_abs, std::fabs(x));
  }
  const double mean = sum / n;
  double ss = 0.0;
  for (double x : d) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0)), max_abs};
}

// Differences that agree to within a few ulps of their magnitude are treated
// as constant: 0.9-0.5 and 0.8-0.4 differ only by rounding.
bool zero_variance(const Moments& m) {
  return m.sd <= 64.0 * std::numeric_limits<double>::epsilon() * m.max_abs;
}

SignificanceResult paired_t(std::span<const double> d, const PairedOptions& options) {
  const Moments m = moments(d);
  const std::size_t n = d.size();
  if (zero_variance(m)) return make_significance(TestMethod::kPairedT, 0.0, 0.0, n, n, options.alpha, true);
  const double t = m.mean / (m.sd / std::sqrt(static_cast<double>(n)));
  return make_significance(TestMethod::kPairedT, t,
                           special::log10_student_t_two_tailed(t, static_cast<double>(n - 1)), n, n,
                           options.alpha);
}

// Signed-rank test, normal approximation with tie correction, zero
// differences dropped, no continuity correction.
SignificanceResult wilcoxon(std::span<const double> d, const PairedOptions& options) {
  const std::size_t n = d.size();
  std::vector<double> nonzero;
  for (double x : d) {
    if (x != 0.0) nonzero.push_back(x);
  }
  const std::size_t nr = nonzero.size();
  if (nr == 0) return make_significance(TestMethod::kWilcoxon, 0.0, 0.0, n, n, options.alpha, true);

  std::vector<std::size_t> order(nr);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::fabs(nonzero[a]) < std::fabs(nonzero[b]);
  });
  double w_plus = 0.0;
  double tie_term = 0.0;
  for (std::size_t i = 0; i < nr;) {
    std::size_t j = i;
    while (j + 1 < nr && std::fabs(nonzero[order[j + 1]]) == std::fabs(nonzero[order[i]])) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (nonzero[order[k]] > 0.0) w_plus += avg_rank;
    }
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  const double nn = static_cast<double>(nr);
  const double mean = nn * (nn + 1.0) / 4.0;
  const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
  if (!(var > 0.0)) return make_significance(TestMethod::kWilcoxon, 0.0, 0.0, n, n, options.alpha, true);
  const double z = (w_plus - mean) / std::sqrt(var);
  return make_significance(TestMethod::kWilcoxon, z, special::log10_normal_two_tailed(z), n, n,
                           options.alpha);
}

// Centered bootstrap of the mean difference. Resample b draws its indices
// from derive_stream(seed, b), so the count is the same for any worker split.
SignificanceResult bootstrap(std::span<const double> d, const PairedOptions& options) {
  const Moments m = moments(d);
  const std::size_t n = d.size();
  if (zero_variance(m)) return make_significance(TestMethod::kBootstrap, m.mean, 0.0, n, n, options.alpha, true);
  const std::size_t resamples = std::max<std::size_t>(options.resamples, 1);
  const double threshold = std::fabs(m.mean);

  const auto count_range = [&](std::size_t begin, std::size_t end) {
    std::size_t extreme = 0;
    for (std::size_t b = begin; b < end; ++b) {
      SplitMix64 rng = derive_stream(options.seed, b);
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) sum += d[rng.below(n)];
      if (std::fabs(sum / static_cast<double>(n) - m.mean) >= threshold) ++extreme;
    }
    return extreme;
  };

  const std::size_t jobs = std::clamp<std::size_t>(options.jobs, 1, resamples);
  std::vector<std::size_t> counts(jobs, 0);
  if (jobs == 1) {
    counts[0] = count_range(0, resamples);
  } else {
    std::vector<std::thread> workers;
    const std::size_t chunk = (resamples + jobs - 1) / jobs;
    for (std::size_t w = 0; w < jobs; ++w) {
      const std::size_t begin = std::min(resamples, w * chunk);
      const std::size_t end = std::min(resamples, begin + chunk);
      workers.emplace_back([&, w, begin, end] { counts[w] = count_range(begin, end); });
    }
    for (auto& t : workers) t.join();
  }
  const std::size_t extreme = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  const double p = static_cast<double>(extreme + 1) / static_cast<double>(resamples + 1);
  return make_significance(TestMethod::kBootstrap, m.mean, std::log10(p), n, n, options.alpha);
}

}  // namespace

SignificanceResult paired_test(std::span<const double> scores_a, std::span<const double> scores_b,
                               TestMethod method, const PairedOptions& options) {
  if (scores_a.size() != scores_b.size()) {
    throw InvalidArgument("paired_test: score vectors differ in length (" +
                          std::to_string(scores_a.size()) + " vs " + std::to_string(scores_b.size()) + ")");
  }
  if (scores_a.size() < 2) throw InvalidArgument("paired_test: need at least two pairs");
  std::vector<double> d(scores_a.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = scores_a[i] - scores_b[i];
  switch (method) {
    case TestMethod::kPairedT: return paired_t(d, options);
    case TestMethod::kWilcoxon: return wilcoxon(d, options);
    case TestMethod::kBootstrap: return bootstrap(d, options);
    case TestMethod::kTwoPropZ: break;
  }
  throw InvalidArgument("paired_test: two-prop-z is not a paired method");
}

}  // namespace sieval
