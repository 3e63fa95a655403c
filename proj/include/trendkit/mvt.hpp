#pragma once

// Rectangle probabilities and equicoordinate quantiles of multivariate
// normal and t distributions.
//
// q = 1 and q = 2 are computed by deterministic quadrature / series, so
// they carry no Monte Carlo noise. q >= 3 uses randomized quasi-Monte
// Carlo (shifted Richtmyer lattice with a baker transform) after a
// width-sorted Cholesky factorization. Results are deterministic for a
// fixed seed.

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>

namespace trendkit {

struct MvtProblem {
    Eigen::VectorXd upper;           // upper bounds, +inf allowed
    Eigen::VectorXd lower;           // empty => all -inf
    Eigen::MatrixXd R;               // correlation matrix
    int df = 0;                      // degrees of freedom; 0 => normal (infinite df)
    double tol = 1e-4;               // absolute error target
    std::uint64_t seed = 42;
    std::size_t max_points = 10'000'000;
};

struct MvtResult {
    double probability = 0.0;
    double error_estimate = 0.0;
    std::size_t points_used = 0;
};

// Raised when the error target cannot be met within the point budget.
class MvtAccuracyError : public std::runtime_error {
  public:
    MvtAccuracyError(double estimate, double error, std::size_t points);
    double best_estimate;
    double achieved_error;
    std::size_t points_used;
};

// P(lower < T <= upper) for T ~ MVT(0, R, df) (MVN when df == 0).
MvtResult mvt_cdf(const MvtProblem& problem);

// Equicoordinate critical value c:
//   one-sided:  P(max_j T_j <= c)  = 1 - alpha
//   two-sided:  P(max_j |T_j| <= c) = 1 - alpha
double equicoordinate_quantile(double alpha, const Eigen::MatrixXd& R, int df,
                               bool two_sided, double tol = 1e-4,
                               std::uint64_t seed = 42);

// Deterministic bivariate building blocks (exposed for testing).
namespace detail {
// P(X1 <= h, X2 <= k) for standard bivariate normal with correlation r.
double bvn_cdf(double h, double k, double r);
// P(T1 <= h, T2 <= k) for central bivariate t, integer df nu >= 1.
double bvt_cdf(double h, double k, double r, int nu);
// Validated correlation matrix: symmetrized, eigenvalue-clipped, unit diagonal.
Eigen::MatrixXd repair_correlation(const Eigen::MatrixXd& R);
} // namespace detail

} // namespace trendkit
