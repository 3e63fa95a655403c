#pragma once

// Mortality-adjusted tumor-rate analysis: poly-k weights, adjusted
// sample sizes and proportions, and the weighted identity-link GLM
// pipeline combined across tuning exponents.

#include "trendkit/inference.hpp"

#include <Eigen/Dense>

#include <vector>

namespace trendkit {

struct PolyKRecord {
    double dose = 0.0;
    double time = 0.0;  // time of death
    int tumor = 0;      // 0/1
};

struct PolyKData {
    std::vector<PolyKRecord> records;
    double t_max = 0.0;  // study duration; 0 => use max observed time

    double resolved_t_max() const;
    void validate() const;
    // groups in increasing dose order with crude per-group counts
    DoseDesign design() const;
};

struct PolyKGroupSummary {
    double dose = 0.0;
    int n = 0;                 // randomized animals
    double tumors = 0.0;       // y_i
    double adjusted_n = 0.0;   // n_i* = sum of weights
    double adjusted_p = 0.0;   // p_i* = y_i / n_i*
};

// weight 1 for tumor-bearing animals, (time/t_max)^k otherwise
Eigen::VectorXd poly_k_weights(const PolyKData& data, double k);

std::vector<PolyKGroupSummary> adjusted_counts(const PolyKData& data, double k);

// Weighted binomial identity-link Tukey-Williams family per k value,
// combined into one max-T family across k values.
JointInference polyk_trend(const PolyKData& data, const std::vector<double>& k_values,
                           const InferenceOptions& options);

} // namespace trendkit
