#pragma once

// Dose designs, contrast matrices and dose metameters: the building
// blocks that define every trend test in the library.

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace trendkit {

// A randomized one-way layout. Group 0 is the control.
struct DoseDesign {
    std::vector<double> doses;        // strictly increasing, first = control
    std::vector<std::string> labels;  // group names
    std::vector<int> n;               // per-group sample sizes

    int groups() const { return static_cast<int>(doses.size()); }
    int k() const { return groups() - 1; }  // number of non-control groups
    int total_n() const;

    // throws std::invalid_argument on violated invariants
    void validate() const;

    // design with default labels derived from the dose values
    static DoseDesign from_doses(std::vector<double> doses, std::vector<int> n);
};

struct ContrastMatrix {
    Eigen::MatrixXd coefficients;       // q x (k+1), every row sums to zero
    std::vector<std::string> row_labels;

    Eigen::Index rows() const { return coefficients.rows(); }
    void validate() const;
};

// Per-group covariate scores for the three regression metameters.
struct DoseMetameters {
    Eigen::VectorXd ari;     // raw doses
    Eigen::VectorXd ord;     // 0, 1, ..., k in dose order
    Eigen::VectorXd arilog;  // log doses, zero dose replaced
    double zero_replacement = 0.0;  // value substituted for a zero control dose
};

// Williams-type contrasts: row m compares the pooled m highest dose groups
// against control, pooling weights proportional to sample size.
ContrastMatrix williams_contrasts(const DoseDesign& design);

// Dunnett contrasts: each dose group against control.
ContrastMatrix dunnett_contrasts(const DoseDesign& design);

// Union of Dunnett and Williams rows with duplicates removed.
ContrastMatrix combined_contrasts(const DoseDesign& design);

// Arithmetic, ordinal and log-scale dose scores. A zero control dose is
// replaced by d1^2/d2 on the log scale (d1/10 when only one non-zero
// dose exists) so geometric designs keep equal log spacing.
DoseMetameters dose_metameters(const DoseDesign& design);

// "62.5", "1000", ... consistent dose formatting for labels
std::string format_dose(double dose);

} // namespace trendkit
