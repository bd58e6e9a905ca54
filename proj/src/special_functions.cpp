#include "sieval/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "sieval/errors.hpp"

namespace sieval::special {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kEps = 1e-16;
constexpr int kMaxIterations = 10000;

// Modified Lentz evaluation of x + (1/2)/(x + (2/2)/(x + (3/2)/(x + ...))).
double erfc_continued_fraction(double x) {
  double f = x;
  double c = f;
  double d = 0.0;
  for (int k = 1; k < kMaxIterations; ++k) {
    const double a = 0.5 * k;
    d = x + a * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    c = x + a / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    const double delta = c * d;
    f *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return f;
}

// Continued fraction for I_x(a,b) (Numerical Recipes betacf), modified Lentz.
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m < kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) return h;
  }
  throw std::runtime_error("incomplete beta continued fraction did not converge");
}

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace

double log_erfc(double x) {
  if (std::isnan(x)) return x;
  if (x < 4.0) return std::log(std::erfc(x));
  if (std::isinf(x)) return -std::numeric_limits<double>::infinity();
  return -x * x - 0.5 * std::log(std::numbers::pi) - std::log(erfc_continued_fraction(x));
}

double log10_normal_two_tailed(double z) {
  return log_erfc(std::fabs(z) / std::numbers::sqrt2) / std::numbers::ln10;
}

double log_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw InvalidArgument("log_incomplete_beta: a and b must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("log_incomplete_beta: x must lie in [0, 1]");
  if (x == 0.0) return -std::numeric_limits<double>::infinity();
  if (x == 1.0) return 0.0;
  const double log_front = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return log_front + std::log(beta_continued_fraction(a, b, x)) - std::log(a);
  }
  const double complement = std::exp(log_front + std::log(beta_continued_fraction(b, a, 1.0 - x)) - std::log(b));
  return std::log1p(-complement);
}

double log10_student_t_two_tailed(double t, double dof) {
  if (!(dof > 0.0)) throw InvalidArgument("student t: degrees of freedom must be positive");
  if (t == 0.0) return 0.0;
  const double t2 = t * t;
  // dof/(dof+t^2) loses nothing to cancellation; for huge t it is ~dof/t^2.
  const double x = dof / (dof + t2);
  return log_incomplete_beta(0.5 * dof, 0.5, x) / std::numbers::ln10;
}

}  // namespace sieval::special
