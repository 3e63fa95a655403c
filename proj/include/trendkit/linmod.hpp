#pragma once

// Ordinary least squares with classical and heteroscedasticity-robust
// covariance, and the per-unit influence contributions that feed joint
// inference across models.

#include <Eigen/Dense>

#include <string>

namespace trendkit {

enum class VcovFlavor { classic, hc0, hc3 };

VcovFlavor parse_vcov(const std::string& name);
std::string vcov_name(VcovFlavor flavor);

struct LinearFit {
    Eigen::MatrixXd X;          // design, n x p
    Eigen::VectorXd coef;       // p
    Eigen::VectorXd residuals;  // n
    Eigen::VectorXd fitted;     // n
    Eigen::MatrixXd xtx_inv;    // (X'X)^-1, p x p
    double sigma2 = 0.0;        // residual variance estimate
    int df_residual = 0;
};

// QR-based fit; throws on rank deficiency naming an offending column.
LinearFit ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

// classic  : S^2 (X'X)^-1
// hc0      : (X'X)^-1 X' diag(e_i^2) X (X'X)^-1
// hc3      : as hc0 with e_i^2 / (1 - h_ii)^2
Eigen::MatrixXd covariance(const LinearFit& fit, VcovFlavor flavor);

// Row i = (X'X)^-1 x_i e_i (hc3: residual scaled by 1/(1-h_ii)).
// crossprod of the rows reproduces the matching sandwich covariance.
Eigen::MatrixXd influence_contributions(const LinearFit& fit,
                                        VcovFlavor flavor = VcovFlavor::hc0);

} // namespace trendkit
