#include <doctest.h>

#include <cmath>
#include <random>

#include "oracle_values.hpp"
#include "sieval/efficiency.hpp"
#include "sieval/errors.hpp"
#include "sieval/significance.hpp"
#include "sieval/special_functions.hpp"
#include "sieval/winrate.hpp"

using namespace sieval;

TEST_CASE("normal tail in log space matches the oracle for z = 1..40") {
  for (int z = 1; z <= 40; ++z) {
    CAPTURE(z);
    CHECK(std::abs(special::log10_normal_two_tailed(z) - oracle::kLog10NormalTwoTailed[z - 1]) < 1e-9);
    CHECK(special::log10_normal_two_tailed(-z) == special::log10_normal_two_tailed(z));
  }
  CHECK(special::log10_normal_two_tailed(0.0) == 0.0);
  CHECK(std::isfinite(special::log10_normal_two_tailed(1000.0)));
}

TEST_CASE("log erfc is continuous across the continued-fraction switch") {
  const double below = special::log_erfc(std::nextafter(4.0, 0.0));
  const double at = special::log_erfc(4.0);
  CHECK(std::abs(below - at) < 1e-12 * std::abs(at));
  CHECK(special::log_erfc(-3.0) == doctest::Approx(std::log(std::erfc(-3.0))));
}

TEST_CASE("student t tail matches the oracle") {
  for (const auto& c : oracle::kTTail) {
    CAPTURE(c.dof);
    CAPTURE(c.t);
    CHECK(std::abs(special::log10_student_t_two_tailed(c.t, c.dof) - c.log10_p) < 1e-9);
  }
  CHECK(special::log10_student_t_two_tailed(0.0, 5) == doctest::Approx(0.0));
}

TEST_CASE("incomplete beta edges") {
  CHECK(std::exp(special::log_incomplete_beta(2, 3, 1.0)) == doctest::Approx(1.0));
  CHECK(special::log_incomplete_beta(2, 3, 0.0) == -INFINITY);
  // I_x(1, 1) = x
  CHECK(std::exp(special::log_incomplete_beta(1, 1, 0.3)) == doctest::Approx(0.3));
  // symmetry I_x(a, b) = 1 - I_{1-x}(b, a)
  const double lhs = std::exp(special::log_incomplete_beta(2.5, 4.0, 0.35));
  const double rhs = 1.0 - std::exp(special::log_incomplete_beta(4.0, 2.5, 0.65));
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("two-proportion z-test matches the oracle") {
  for (const auto& c : oracle::kTwoProp) {
    CAPTURE(c.k1);
    CAPTURE(c.k2);
    const auto r = two_prop_z(c.k1, c.n1, c.k2, c.n2);
    CHECK(std::abs(r.statistic - c.z) < 1e-9);
    CHECK(std::abs(r.log10_p - c.log10_p) < 1e-9);
    CHECK(r.significant);
    CHECK(r.method == TestMethod::kTwoPropZ);
  }
}

TEST_CASE("two-proportion z-test edge cases") {
  const auto same = two_prop_z(150, 300, 150, 300);
  CHECK(same.statistic == 0.0);
  CHECK(same.p_two_tailed == 1.0);
  CHECK(!same.significant);
  const auto all = two_prop_z(300, 300, 300, 300);
  CHECK(all.degenerate);
  CHECK(all.p_two_tailed == 1.0);
  CHECK(two_prop_z(0, 300, 0, 300).degenerate);
  // the continuity correction pulls z towards zero
  const auto cc = two_prop_z(288, 300, 267, 300, {0.05, true});
  CHECK(std::abs(cc.statistic) < std::abs(two_prop_z(288, 300, 267, 300).statistic));
  CHECK_THROWS_AS(two_prop_z(301, 300, 0, 300), InvalidArgument);
  CHECK_THROWS_AS(two_prop_z(1, 0, 0, 300), InvalidArgument);
  // p below the binary64 range is reported as 0 with a finite log10
  const auto extreme = two_prop_z(3000000, 3000000, 0, 3000000);
  CHECK(extreme.p_two_tailed == 0.0);
  CHECK(std::isfinite(extreme.log10_p));
}

TEST_CASE("paired t matches the oracle") {
  const auto r = paired_test(oracle::kMixedA, oracle::kMixedB, TestMethod::kPairedT);
  CHECK(r.statistic == doctest::Approx(oracle::kMixedT).epsilon(1e-9));
  CHECK(r.p_two_tailed == doctest::Approx(oracle::kMixedP).epsilon(1e-9));
  CHECK(std::abs(r.log10_p - oracle::kMixedLog10P) < 1e-9);
  CHECK(!r.significant);
  CHECK(r.n1 == 8);
}

TEST_CASE("p = 0.053 is not significant at alpha 0.05") {
  const auto r = paired_test(oracle::kGateA, oracle::kGateB, TestMethod::kPairedT);
  CHECK(r.statistic == doctest::Approx(oracle::kGateT).epsilon(1e-9));
  CHECK(r.p_two_tailed == doctest::Approx(oracle::kGateP).epsilon(1e-9));
  CHECK(!r.significant);
  CHECK(paired_test(oracle::kGateA, oracle::kGateB, TestMethod::kPairedT, {0.06}).significant);
}

TEST_CASE("zero-variance differences are degenerate") {
  const double a[] = {0.9, 0.8, 0.95, 0.85, 0.9};
  const double b[] = {0.5, 0.4, 0.55, 0.45, 0.5};
  const auto r = paired_test(a, b, TestMethod::kPairedT);
  CHECK(r.degenerate);
  CHECK(r.p_two_tailed == 1.0);
  const auto same = paired_test(a, a, TestMethod::kPairedT);
  CHECK(same.p_two_tailed == 1.0);
  CHECK(!same.significant);
  CHECK(paired_test(a, a, TestMethod::kWilcoxon).degenerate);
  CHECK(paired_test(a, a, TestMethod::kBootstrap).degenerate);
}

TEST_CASE("wilcoxon matches scipy's normal approximation") {
  const auto r = paired_test(oracle::kMixedA, oracle::kMixedB, TestMethod::kWilcoxon);
  CHECK(r.p_two_tailed == doctest::Approx(oracle::kMixedWilcoxonP).epsilon(1e-12));
  const auto ties = paired_test(oracle::kTiesA, oracle::kTiesB, TestMethod::kWilcoxon);
  CHECK(ties.p_two_tailed == doctest::Approx(oracle::kTiesWilcoxonP).epsilon(1e-12));
  CHECK(ties.statistic > 0.0);
}

TEST_CASE("bootstrap is seeded and independent of the thread count") {
  PairedOptions one{0.05, 2000, 42, 1};
  PairedOptions many{0.05, 2000, 42, 7};
  const auto a = paired_test(oracle::kMixedA, oracle::kMixedB, TestMethod::kBootstrap, one);
  const auto b = paired_test(oracle::kMixedA, oracle::kMixedB, TestMethod::kBootstrap, many);
  CHECK(a.p_two_tailed == b.p_two_tailed);
  CHECK(a.statistic == b.statistic);
  CHECK(a.p_two_tailed > 0.0);
  CHECK(a.p_two_tailed <= 1.0);
  // (count + 1) / (B + 1) puts p on a 1/2001 grid
  const double scaled = a.p_two_tailed * 2001.0;
  CHECK(std::abs(scaled - std::round(scaled)) < 1e-6);
  // a large consistent shift is significant
  std::vector<double> x(40), y(40);
  std::mt19937_64 rng(1);
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = static_cast<double>(rng() % 1000) / 1000.0;
    x[i] = y[i] + 0.2 + static_cast<double>(rng() % 100) / 1000.0;
  }
  CHECK(paired_test(x, y, TestMethod::kBootstrap, one).significant);
}

TEST_CASE("paired tests validate their inputs") {
  const double a[] = {1, 2, 3};
  const double b[] = {1, 2};
  CHECK_THROWS_AS(paired_test(a, b, TestMethod::kPairedT), InvalidArgument);
  CHECK_THROWS_AS(paired_test(std::span(a, 1), std::span(a, 1), TestMethod::kPairedT), InvalidArgument);
  CHECK_THROWS_AS(paired_test(a, a, TestMethod::kTwoPropZ), InvalidArgument);
  CHECK(parse_test_method("wilcoxon") == TestMethod::kWilcoxon);
  CHECK_THROWS_AS(parse_test_method("anova"), InvalidArgument);
}

TEST_CASE("winning rate display") {
  const auto cell = [](Task task, std::vector<MetricComparison> c) { return winning_rate(c, task); };
  CHECK(cell(Task::kJsonExtract, {{"rougeL_f1", true}, {"cosine", true}, {"json_parse_ok", false}}).display() ==
        "2/3 = 67%");
  CHECK(cell(Task::kJsonExtract, {{"rougeL_f1", true}, {"cosine", true}, {"json_parse_ok", true}}).display() ==
        "3/3 = 100%");
  CHECK(cell(Task::kKge, {{"rougeL_f1", true}, {"cosine", false}}).display() == "1/2 = 50%");
  CHECK(cell(Task::kNer, {{"rougeL_f1", false}, {"cosine", false}}).display() == "0/2 = 0%");
  CHECK(cell(Task::kJsonExtract, {{"rougeL_f1", true}, {"cosine", false}, {"json_parse_ok", false}}).display() ==
        "1/3 = 33%");
  CHECK_THROWS_AS(cell(Task::kKge, {{"rougeL_f1", true}, {"json_parse_ok", true}}), InvalidArgument);
  CHECK_THROWS_AS(cell(Task::kKge, {{"rougeL_f1", true}}), InvalidArgument);
  CHECK(applicable_metrics(Task::kJsonExtract).size() == 3);
  CHECK(applicable_metrics(Task::kNer).size() == 2);
}

TEST_CASE("efficiency plateau on reference parse counts") {
  const auto curve = efficiency_curve("parse_count", {{100, 144}, {300, 267}, {500, 282}, {1000, 288}}, kCountEpsilon);
  REQUIRE(curve.plateau_size.has_value());
  CHECK(*curve.plateau_size == 300);
  REQUIRE(curve.marginal_gains.size() == 3);
  CHECK(curve.marginal_gains[0].delta == 123.0);
  CHECK(curve.marginal_gains[2].from_size == 500);
  CHECK(curve.marginal_gains[2].to_size == 1000);
}

TEST_CASE("efficiency plateau edge cases") {
  CHECK(!efficiency_curve("m", {{100, 0.1}, {300, 0.5}, {500, 0.9}}, 0.02).plateau_size);
  CHECK(*efficiency_curve("m", {{100, 0.5}, {300, 0.505}, {500, 0.51}}, 0.02).plateau_size == 100);
  // the last gain alone decides whether any plateau exists
  CHECK(!efficiency_curve("m", {{100, 0.5}, {300, 0.505}, {500, 0.9}}, 0.02).plateau_size);
  CHECK_THROWS_AS(efficiency_curve("m", {{100, 1}}, 1), InvalidArgument);
  CHECK_THROWS_AS(efficiency_curve("m", {{300, 1}, {100, 2}}, 1), InvalidArgument);
  CHECK_THROWS_AS(efficiency_curve("m", {{100, 1}, {300, 2}}, 0), InvalidArgument);
}
