#include "trendkit/distributions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace trendkit {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kSqrt2Pi = 2.5066282746310005024;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kFpMin = std::numeric_limits<double>::min() / kEps;

// Acklam rational approximation, refined below to full precision.
double norm_quantile_approx(double p) {
    static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                -2.759285104469687e+02, 1.383577518672690e+02,
                                -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double q = p - 0.5;
    double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Incomplete gamma P(a,x) by series expansion (x < a+1).
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 1000; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Incomplete gamma Q(a,x) by continued fraction (x >= a+1).
double gamma_q_contfrac(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kFpMin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = b + an / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// Continued fraction for the incomplete beta (modified Lentz).
double beta_contfrac(double a, double b, double x) {
    const int max_it = 10000;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_it; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= kEps) break;
    }
    return h;
}

} // namespace

double norm_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("norm_quantile: p must lie in (0,1)");
    double x = norm_quantile_approx(p);
    // one Halley step against the exact CDF
    double e = norm_cdf(x) - p;
    double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

double gamma_p(double a, double x) {
    if (a <= 0.0 || x < 0.0)
        throw std::invalid_argument("gamma_p: requires a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_contfrac(a, x);
}

double gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0)
        throw std::invalid_argument("gamma_q: requires a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_contfrac(a, x);
}

double gamma_p_inv(double p, double a) {
    if (a <= 0.0) throw std::invalid_argument("gamma_p_inv: a must be positive");
    if (p <= 0.0) return 0.0;
    if (p >= 1.0)
        throw std::invalid_argument("gamma_p_inv: p must be below 1");
    const double a1 = a - 1.0;
    const double gln = std::lgamma(a);
    double x;
    if (a > 1.0) {
        // Wilson-Hilferty starting point
        double pp = (p < 0.5) ? p : 1.0 - p;
        double t = std::sqrt(-2.0 * std::log(pp));
        x = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t;
        if (p < 0.5) x = -x;
        x = std::max(1e-3, a * std::pow(1.0 - 1.0 / (9.0 * a) - x / (3.0 * std::sqrt(a)), 3));
    } else {
        double t = 1.0 - a * (0.253 + a * 0.12);
        if (p < t)
            x = std::pow(p / t, 1.0 / a);
        else
            x = 1.0 - std::log(1.0 - (p - t) / (1.0 - t));
    }
    double lna1 = 0.0, afac = 0.0;
    if (a > 1.0) {
        lna1 = std::log(a1);
        afac = std::exp(a1 * (lna1 - 1.0) - gln);
    }
    for (int j = 0; j < 24; ++j) {
        if (x <= 0.0) return 0.0;
        double err = gamma_p(a, x) - p;
        double t;
        if (a > 1.0)
            t = afac * std::exp(-(x - a1) + a1 * (std::log(x) - lna1));
        else
            t = std::exp(-x + a1 * std::log(x) - gln);
        double u = err / t;
        x -= (t = u / (1.0 - 0.5 * std::min(1.0, u * ((a - 1.0) / x - 1.0))));
        if (x <= 0.0) x = 0.5 * (x + t);
        if (std::fabs(t) < kEps * x) break;
    }
    return x;
}

double inc_beta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0)
        throw std::invalid_argument("inc_beta: requires a > 0 and b > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0))
        return bt * beta_contfrac(a, b, x) / a;
    return 1.0 - bt * beta_contfrac(b, a, 1.0 - x) / b;
}

double chisq_cdf(double x, double nu) { return gamma_p(0.5 * nu, 0.5 * x); }

double chisq_quantile(double p, double nu) { return 2.0 * gamma_p_inv(p, 0.5 * nu); }

double t_cdf(double x, double nu) {
    if (nu <= 0.0) throw std::invalid_argument("t_cdf: nu must be positive");
    if (nu > 1e8) return norm_cdf(x);
    if (x == 0.0) return 0.5;
    double p = 0.5 * inc_beta(0.5 * nu, 0.5, nu / (nu + x * x));
    return x > 0.0 ? 1.0 - p : p;
}

double t_pdf(double x, double nu) {
    if (nu > 1e8) return norm_pdf(x);
    double lg = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                0.5 * std::log(nu * M_PI);
    return std::exp(lg - 0.5 * (nu + 1.0) * std::log1p(x * x / nu));
}

double t_quantile(double p, double nu) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("t_quantile: p must lie in (0,1)");
    if (nu > 1e8) return norm_quantile(p);
    if (p == 0.5) return 0.0;
    // Cornish-Fisher start, then safeguarded Newton on the CDF
    double z = norm_quantile(p);
    double z3 = z * z * z, z5 = z3 * z * z;
    double x = z + (z3 + z) / (4.0 * nu) + (5.0 * z5 + 16.0 * z3 + 3.0 * z) / (96.0 * nu * nu);
    for (int it = 0; it < 60; ++it) {
        double f = t_cdf(x, nu) - p;
        double d = t_pdf(x, nu);
        if (d <= 0.0) break;
        double step = f / d;
        // limit wild steps in the extreme tails
        double cap = 2.0 * (1.0 + std::fabs(x));
        if (step > cap) step = cap;
        if (step < -cap) step = -cap;
        x -= step;
        if (std::fabs(step) < 1e-14 * std::max(1.0, std::fabs(x))) break;
    }
    return x;
}

} // namespace trendkit
