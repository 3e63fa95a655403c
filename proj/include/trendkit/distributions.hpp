#pragma once

// Univariate distribution functions used throughout the library:
// normal, Student t, chi-square, and the incomplete gamma/beta
// machinery behind them. All functions are deterministic and
// accurate to near double precision.

namespace trendkit {

// standard normal
double norm_cdf(double x);
double norm_pdf(double x);
// inverse CDF; p in (0,1)
double norm_quantile(double p);

// regularized incomplete gamma P(a,x) and Q(a,x) = 1 - P(a,x)
double gamma_p(double a, double x);
double gamma_q(double a, double x);
// smallest x with P(a,x) = p
double gamma_p_inv(double p, double a);

// regularized incomplete beta I_x(a,b)
double inc_beta(double a, double b, double x);

// chi-square
double chisq_cdf(double x, double nu);
double chisq_quantile(double p, double nu);

// Student t with nu > 0 degrees of freedom; nu may be non-integral.
double t_cdf(double x, double nu);
double t_pdf(double x, double nu);
double t_quantile(double p, double nu);

} // namespace trendkit
