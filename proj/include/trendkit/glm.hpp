#pragma once

// Generalized linear models fitted by iteratively reweighted least
// squares: binomial (logit or identity link) and poisson (log link),
// with prior weights, Pearson dispersion estimation, and the add-1
// small-sample correction for grouped binomial data.

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

namespace trendkit {

enum class FamilyKind { binomial, poisson };
enum class LinkKind { logit, identity, log_link };
enum class DispersionMode { fixed_1, pearson };

struct Family {
    FamilyKind kind = FamilyKind::binomial;
    LinkKind link = LinkKind::logit;
    DispersionMode dispersion_mode = DispersionMode::fixed_1;

    void validate() const;
    static Family binomial_logit();
    static Family binomial_identity();
    static Family poisson_log();
};

struct GlmFit {
    Eigen::MatrixXd X;
    Eigen::VectorXd coef;                  // link scale
    Eigen::VectorXd mu;                    // fitted means (per-trial for binomial)
    Eigen::MatrixXd working_covariance;    // phi * (X'WX)^-1
    Eigen::MatrixXd influence;             // n x p, crossprod = sandwich covariance
    double deviance = 0.0;
    double pearson_dispersion = 1.0;       // estimate; applied only in pearson mode
    bool dispersion_degenerate = false;    // saturated fit, zero residuals
    bool converged = false;
    int iterations = 0;
    int df_residual = 0;
    Family family;
};

// y: successes (binomial) or counts (poisson). `trials` empty => 1 per row.
// `prior_weights` empty => 1 per row; zero weights drop rows from df.
GlmFit irls_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                const Eigen::VectorXd& trials, const Eigen::VectorXd& prior_weights,
                const Family& family, int max_iter = 50, double tol = 1e-9);

// Per-group continuity fix: one pseudo-success and one pseudo-failure.
std::pair<std::vector<double>, std::vector<double>>
add1_correction(const std::vector<double>& successes, const std::vector<double>& trials);

// Sum of squared Pearson residuals over n - p; throws if a fitted value
// has zero variance while its residual is non-zero.
double pearson_dispersion(const GlmFit& fit, const Eigen::VectorXd& y,
                          const Eigen::VectorXd& trials,
                          const Eigen::VectorXd& prior_weights);

} // namespace trendkit
