#pragma once

namespace sieval::special {

// Natural log of erfc(x). Finite for every finite x, including arguments
// where erfc itself underflows binary64 (x > ~26.5). Uses the continued
// fraction erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
// for x >= 4 and the libm erfc below that.
double log_erfc(double x);

// log10 of the two-tailed standard normal tail P(|Z| >= |z|) = erfc(|z|/sqrt(2)).
double log10_normal_two_tailed(double z);

// Natural log of the regularized incomplete beta I_x(a, b), a, b > 0,
// 0 <= x <= 1. Accurate in the far lower tail where I_x underflows.
double log_incomplete_beta(double a, double b, double x);

// log10 of the two-tailed Student-t tail P(|T| >= |t|) with `dof` degrees of
// freedom, I_{dof/(dof+t^2)}(dof/2, 1/2).
double log10_student_t_two_tailed(double t, double dof);

}  // namespace sieval::special
