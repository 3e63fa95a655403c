#pragma once

// Multiple marginal models: stack scalar parameters from several models
// fitted to the same units and estimate their joint correlation from the
// empirical crossproduct of per-unit influence contributions.

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace trendkit {

struct MarginalModel {
    std::string label;
    double estimate = 0.0;
    double variance = 0.0;       // the model's own variance for its t statistic
    Eigen::VectorXd influence;   // per-unit contributions to the estimate
    int df = 0;                  // residual df; 0 means asymptotic (normal)
};

struct MarginalSet {
    std::vector<MarginalModel> models;
    Eigen::Index unit_count = 0;

    void add(MarginalModel model);
    Eigen::Index size() const { return static_cast<Eigen::Index>(models.size()); }
    void validate() const;
};

// R_ab = <psi_a, psi_b> / sqrt(<psi_a,psi_a> <psi_b,psi_b>), eigenvalue-clipped
// to a valid correlation matrix.
Eigen::MatrixXd joint_correlation(const MarginalSet& set);

// Concatenate sets over identical units; labels prefixed by the set names.
MarginalSet combine(const std::vector<MarginalSet>& sets,
                    const std::vector<std::string>& names);

} // namespace trendkit
