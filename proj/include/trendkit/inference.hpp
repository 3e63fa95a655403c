#pragma once

// Joint max-T inference over marginal models: per-comparison t statistics,
// single-step adjusted p-values, simultaneous confidence bounds, and the
// intersection-union downturn guard.

#include "trendkit/design.hpp"
#include "trendkit/glm.hpp"
#include "trendkit/linmod.hpp"
#include "trendkit/mmm.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace trendkit {

enum class Alternative { greater, less, two_sided };
enum class ContrastType { williams, dunnett, both };
enum class Scaling { ari, ord, arilog, treat };

Alternative parse_alternative(const std::string& name);
std::string alternative_name(Alternative a);
ContrastType parse_ctype(const std::string& name);
Scaling parse_scaling(const std::string& name);

// Joint degrees of freedom across marginal models. min_marginal takes the
// smallest residual df (asymptotic marginals count as infinite).
struct DfRule {
    enum class Kind { min_marginal, fixed, infinite };
    Kind kind = Kind::min_marginal;
    int fixed_df = 0;

    static DfRule min_marginal() { return {Kind::min_marginal, 0}; }
    static DfRule fixed(int df) { return {Kind::fixed, df}; }
    static DfRule infinite() { return {Kind::infinite, 0}; }
    static DfRule parse(const std::string& name);
    std::string name() const;
};

struct InferenceOptions {
    VcovFlavor vcov = VcovFlavor::hc0;
    Alternative alternative = Alternative::greater;
    double alpha = 0.05;
    DfRule df_rule = DfRule::min_marginal();
    double mvt_tol = 1e-4;
    std::uint64_t seed = 42;
    ContrastType ctype = ContrastType::williams;
    std::vector<Scaling> scalings = {Scaling::ari, Scaling::ord, Scaling::arilog,
                                     Scaling::treat};
    bool with_bounds = true;
};

struct JointInference {
    std::vector<std::string> labels;
    Eigen::VectorXd estimates;
    Eigen::VectorXd std_errors;
    Eigen::VectorXd t_stats;
    Eigen::VectorXd adjusted_p;
    Eigen::VectorXd lower_bounds;  // NaN where not produced
    Eigen::VectorXd upper_bounds;
    Eigen::MatrixXd R;
    int df = 0;  // 0 = asymptotic/normal
    double critical_value = std::numeric_limits<double>::quiet_NaN();
    Alternative alternative = Alternative::greater;
    double alpha = 0.05;
    double mvt_tol = 1e-4;
    std::uint64_t seed = 42;
    double max_mvt_error = 0.0;

    Eigen::Index size() const { return t_stats.size(); }
};

struct ScalarTest {
    std::string label;
    double estimate = 0.0;
    double std_error = 0.0;
    double t = 0.0;
    int df = 0;
    double p = 1.0;  // per the chosen alternative, unadjusted
};

struct DownturnDecision {
    bool trend_significant = false;
    bool high_vs_control_significant = false;
    bool claim_monotone = false;
    double min_adjusted_p = 1.0;
    ScalarTest high_vs_control;
    double alpha = 0.05;
};

// Response values with a group index per unit (0 = control).
struct GroupedData {
    Eigen::VectorXd y;
    std::vector<int> group;
    Eigen::MatrixXd covariates;  // optional n x m block appended to every design

    void validate(const DoseDesign& design) const;
};

// t statistics, max-T adjusted p-values, joint correlation.
JointInference max_t_test(const MarginalSet& set, Alternative alternative, double alpha,
                          DfRule df_rule, double mvt_tol = 1e-4, std::uint64_t seed = 42);

// Adds the simultaneous bound(s) dual to the max-T test.
JointInference simultaneous_bounds(JointInference inference);

// Monotone-trend claim only when the joint trend test and the
// control-vs-high-dose comparison both reject.
DownturnDecision downturn_guard(const JointInference& trend,
                                const ScalarTest& high_vs_control, double alpha);

// Unadjusted control-vs-highest-dose comparison from the cell-means fit.
ScalarTest high_vs_control_test(const GroupedData& data, const DoseDesign& design,
                                VcovFlavor vcov, Alternative alternative);

// Williams (or Dunnett/combined) multiple contrast test on group means.
JointInference williams_mct(const GroupedData& data, const DoseDesign& design,
                            const InferenceOptions& options);

// Joint Tukey regressions + contrast family via multiple marginal models.
JointInference tukey_williams_joint(const GroupedData& data, const DoseDesign& design,
                                    const InferenceOptions& options);

// GLM counterpart for proportions and counts. For binomial data `trials`
// holds per-row denominators (empty = Bernoulli rows).
struct GlmTrendData {
    Eigen::VectorXd y;
    Eigen::VectorXd trials;
    std::vector<int> group;
    Eigen::VectorXd prior_weights;  // optional
    Eigen::MatrixXd covariates;     // optional
};

JointInference tukey_williams_glm(const GlmTrendData& data, const DoseDesign& design,
                                  const Family& family, const InferenceOptions& options);

// Marginal-model builders shared by the pipelines.
MarginalSet linear_marginal_set(const GroupedData& data, const DoseDesign& design,
                                const InferenceOptions& options);
MarginalSet glm_marginal_set(const GlmTrendData& data, const DoseDesign& design,
                             const Family& family, const InferenceOptions& options);

} // namespace trendkit
