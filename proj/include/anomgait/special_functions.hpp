#pragma once

namespace anomgait::stats {

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation,
// accurate to ~1e-14 for the parameter ranges used here.
double reg_inc_beta(double a, double b, double x);

// Regularized lower incomplete gamma P(a, x).
double reg_lower_gamma(double a, double x);

// CDFs of the Fisher F(d1, d2) and chi-square(k) distributions.
double f_cdf(double x, double d1, double d2);
double chi2_cdf(double x, double k);

// Upper critical values: returns q with P(X > q) = alpha, inverted by
// bisection on the CDF to |CDF(q) - (1 - alpha)| <= 1e-12.
double f_critical(double alpha, double d1, double d2);
double chi2_critical(double alpha, double dof);

}  // namespace anomgait::stats
