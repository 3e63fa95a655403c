#include "trendkit/inference.hpp"
#include "trendkit/distributions.hpp"
#include "trendkit/mvt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace trendkit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string scaling_label(Scaling s) {
    switch (s) {
        case Scaling::ari: return "Tukey: arithmetic";
        case Scaling::ord: return "Tukey: ordinal";
        case Scaling::arilog: return "Tukey: ari-logarithmic";
        case Scaling::treat: return "treat";
    }
    return "?";
}

Eigen::VectorXd metameter_scores(const DoseMetameters& met, Scaling s) {
    switch (s) {
        case Scaling::ari: return met.ari;
        case Scaling::ord: return met.ord;
        case Scaling::arilog: return met.arilog;
        default: throw std::logic_error("treat is not a metameter");
    }
}

ContrastMatrix contrasts_for(const DoseDesign& design, ContrastType ctype,
                             std::vector<std::string>* prefixes) {
    switch (ctype) {
        case ContrastType::williams: {
            ContrastMatrix cm = williams_contrasts(design);
            prefixes->assign(cm.row_labels.size(), "Williams: ");
            return cm;
        }
        case ContrastType::dunnett: {
            ContrastMatrix cm = dunnett_contrasts(design);
            prefixes->assign(cm.row_labels.size(), "Dunnett: ");
            return cm;
        }
        case ContrastType::both: {
            ContrastMatrix cm = combined_contrasts(design);
            const auto k = static_cast<std::size_t>(design.k());
            prefixes->assign(cm.row_labels.size(), "Williams: ");
            for (std::size_t r = 0; r < k && r < prefixes->size(); ++r)
                (*prefixes)[r] = "Dunnett: ";
            return cm;
        }
    }
    throw std::logic_error("unknown contrast type");
}

int resolve_df(const MarginalSet& set, DfRule rule) {
    switch (rule.kind) {
        case DfRule::Kind::infinite: return 0;
        case DfRule::Kind::fixed:
            if (rule.fixed_df < 1)
                throw std::invalid_argument("df_rule: fixed df must be >= 1");
            return rule.fixed_df;
        case DfRule::Kind::min_marginal: {
            int best = 0;  // 0 = infinite
            for (const auto& m : set.models) {
                if (m.df > 0 && (best == 0 || m.df < best)) best = m.df;
            }
            return best;
        }
    }
    return 0;
}

// group-indicator design with optional covariate block
Eigen::MatrixXd cell_means_design(const std::vector<int>& group, int n_groups,
                                  const Eigen::MatrixXd& covariates) {
    const auto n = static_cast<Eigen::Index>(group.size());
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, n_groups + covariates.cols());
    for (Eigen::Index i = 0; i < n; ++i) X(i, group[i]) = 1.0;
    if (covariates.cols() > 0) X.rightCols(covariates.cols()) = covariates;
    return X;
}

Eigen::MatrixXd regression_design(const std::vector<int>& group,
                                  const Eigen::VectorXd& group_scores,
                                  const Eigen::MatrixXd& covariates) {
    const auto n = static_cast<Eigen::Index>(group.size());
    Eigen::MatrixXd X = Eigen::MatrixXd::Ones(n, 2 + covariates.cols());
    for (Eigen::Index i = 0; i < n; ++i) X(i, 1) = group_scores[group[i]];
    if (covariates.cols() > 0) X.rightCols(covariates.cols()) = covariates;
    return X;
}

} // namespace

Alternative parse_alternative(const std::string& name) {
    if (name == "greater") return Alternative::greater;
    if (name == "less") return Alternative::less;
    if (name == "two-sided" || name == "two.sided" || name == "two_sided")
        return Alternative::two_sided;
    throw std::invalid_argument("unknown alternative: " + name);
}

std::string alternative_name(Alternative a) {
    switch (a) {
        case Alternative::greater: return "greater";
        case Alternative::less: return "less";
        case Alternative::two_sided: return "two-sided";
    }
    return "?";
}

ContrastType parse_ctype(const std::string& name) {
    if (name == "williams") return ContrastType::williams;
    if (name == "dunnett") return ContrastType::dunnett;
    if (name == "both") return ContrastType::both;
    throw std::invalid_argument("unknown contrast type: " + name);
}

Scaling parse_scaling(const std::string& name) {
    if (name == "ari") return Scaling::ari;
    if (name == "ord") return Scaling::ord;
    if (name == "arilog") return Scaling::arilog;
    if (name == "treat") return Scaling::treat;
    throw std::invalid_argument("unknown scaling: " + name);
}

DfRule DfRule::parse(const std::string& name) {
    if (name == "min-marginal" || name == "min_marginal") return min_marginal();
    if (name == "infinite" || name == "asymptotic") return infinite();
    if (name.rfind("fixed:", 0) == 0) {
        int df = std::stoi(name.substr(6));
        return fixed(df);
    }
    throw std::invalid_argument("unknown df rule: " + name);
}

std::string DfRule::name() const {
    switch (kind) {
        case Kind::min_marginal: return "min-marginal";
        case Kind::fixed: return "fixed:" + std::to_string(fixed_df);
        case Kind::infinite: return "infinite";
    }
    return "?";
}

void GroupedData::validate(const DoseDesign& design) const {
    design.validate();
    if (static_cast<std::size_t>(y.size()) != group.size())
        throw std::invalid_argument("data: response/group length mismatch");
    if (covariates.rows() > 0 && covariates.rows() != y.size())
        throw std::invalid_argument("data: covariate row count mismatch");
    std::vector<int> counts(design.groups(), 0);
    for (int g : group) {
        if (g < 0 || g >= design.groups())
            throw std::invalid_argument("data: group index out of range");
        ++counts[g];
    }
    for (int g = 0; g < design.groups(); ++g)
        if (counts[g] != design.n[g])
            throw std::invalid_argument("data: group counts do not match the design");
}

JointInference max_t_test(const MarginalSet& set, Alternative alternative, double alpha,
                          DfRule df_rule, double mvt_tol, std::uint64_t seed) {
    set.validate();
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("max_t_test: alpha must lie in (0,1)");
    const auto q = set.size();

    JointInference inf;
    inf.alternative = alternative;
    inf.alpha = alpha;
    inf.mvt_tol = mvt_tol;
    inf.seed = seed;
    inf.df = resolve_df(set, df_rule);
    inf.labels.reserve(q);
    inf.estimates.resize(q);
    inf.std_errors.resize(q);
    inf.t_stats.resize(q);
    inf.adjusted_p.resize(q);
    inf.lower_bounds = Eigen::VectorXd::Constant(q, kNaN);
    inf.upper_bounds = Eigen::VectorXd::Constant(q, kNaN);

    for (Eigen::Index j = 0; j < q; ++j) {
        const auto& m = set.models[j];
        inf.labels.push_back(m.label);
        inf.estimates[j] = m.estimate;
        double se = std::sqrt(m.variance);
        if (!(se > 0.0) || !std::isfinite(se))
            throw std::runtime_error("max_t_test: degenerate standard error for '" +
                                     m.label + "'");
        inf.std_errors[j] = se;
        inf.t_stats[j] = m.estimate / se;
    }
    inf.R = q > 1 ? joint_correlation(set) : Eigen::MatrixXd::Identity(1, 1);

    MvtProblem prob;
    prob.R = inf.R;
    prob.df = inf.df;
    prob.tol = mvt_tol;
    prob.seed = seed;
    for (Eigen::Index j = 0; j < q; ++j) {
        double tj = inf.t_stats[j];
        double p;
        if (alternative == Alternative::greater) {
            prob.upper = Eigen::VectorXd::Constant(q, tj);
            prob.lower.resize(0);
        } else if (alternative == Alternative::less) {
            prob.upper = Eigen::VectorXd::Constant(q, -tj);
            prob.lower.resize(0);
        } else {
            prob.upper = Eigen::VectorXd::Constant(q, std::fabs(tj));
            prob.lower = Eigen::VectorXd::Constant(q, -std::fabs(tj));
        }
        MvtResult res = mvt_cdf(prob);
        p = 1.0 - res.probability;
        inf.max_mvt_error = std::max(inf.max_mvt_error, res.error_estimate);
        inf.adjusted_p[j] = std::min(1.0, std::max(0.0, p));
    }
    return inf;
}

JointInference simultaneous_bounds(JointInference inference) {
    const auto q = inference.size();
    const bool two_sided = inference.alternative == Alternative::two_sided;
    double c = equicoordinate_quantile(inference.alpha, inference.R, inference.df,
                                       two_sided, inference.mvt_tol, inference.seed);
    inference.critical_value = c;
    for (Eigen::Index j = 0; j < q; ++j) {
        double margin = c * inference.std_errors[j];
        switch (inference.alternative) {
            case Alternative::greater:
                inference.lower_bounds[j] = inference.estimates[j] - margin;
                break;
            case Alternative::less:
                inference.upper_bounds[j] = inference.estimates[j] + margin;
                break;
            case Alternative::two_sided:
                inference.lower_bounds[j] = inference.estimates[j] - margin;
                inference.upper_bounds[j] = inference.estimates[j] + margin;
                break;
        }
    }
    return inference;
}

DownturnDecision downturn_guard(const JointInference& trend,
                                const ScalarTest& high_vs_control, double alpha) {
    DownturnDecision d;
    d.alpha = alpha;
    d.min_adjusted_p = trend.adjusted_p.minCoeff();
    d.trend_significant = d.min_adjusted_p < alpha;
    d.high_vs_control = high_vs_control;
    d.high_vs_control_significant = high_vs_control.p < alpha;
    d.claim_monotone = d.trend_significant && d.high_vs_control_significant;
    return d;
}

ScalarTest high_vs_control_test(const GroupedData& data, const DoseDesign& design,
                                VcovFlavor vcov, Alternative alternative) {
    data.validate(design);
    const int g = design.groups();
    Eigen::MatrixXd X = cell_means_design(data.group, g, data.covariates);
    LinearFit fit = ols_fit(X, data.y);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(X.cols());
    c[0] = -1.0;
    c[g - 1] = 1.0;
    Eigen::MatrixXd V = covariance(fit, vcov);
    ScalarTest st;
    st.label = design.labels[g - 1] + "-" + design.labels[0];
    st.estimate = c.dot(fit.coef);
    st.std_error = std::sqrt(c.dot(V * c));
    if (!(st.std_error > 0.0))
        throw std::runtime_error("high_vs_control: degenerate standard error");
    st.t = st.estimate / st.std_error;
    st.df = fit.df_residual;
    switch (alternative) {
        case Alternative::greater: st.p = 1.0 - t_cdf(st.t, st.df); break;
        case Alternative::less: st.p = t_cdf(st.t, st.df); break;
        case Alternative::two_sided: st.p = 2.0 * (1.0 - t_cdf(std::fabs(st.t), st.df)); break;
    }
    return st;
}

MarginalSet linear_marginal_set(const GroupedData& data, const DoseDesign& design,
                                const InferenceOptions& options) {
    data.validate(design);
    const int g = design.groups();
    const auto n = data.y.size();
    if (n < g + 2)
        throw std::invalid_argument("inference: need at least k+2 observations overall");

    DoseMetameters met = dose_metameters(design);
    MarginalSet set;

    for (Scaling s : options.scalings) {
        if (s == Scaling::treat) continue;
        Eigen::MatrixXd X = regression_design(data.group, metameter_scores(met, s),
                                              data.covariates);
        LinearFit fit = ols_fit(X, data.y);
        if (!(fit.sigma2 > 0.0))
            throw std::runtime_error("inference: zero residual variance (constant response)");
        Eigen::MatrixXd V = covariance(fit, options.vcov);
        Eigen::MatrixXd infl = influence_contributions(fit, options.vcov);
        MarginalModel m;
        m.label = scaling_label(s);
        m.estimate = fit.coef[1];
        m.variance = V(1, 1);
        m.influence = infl.col(1);
        m.df = fit.df_residual;
        set.add(std::move(m));
    }

    bool want_treat = std::find(options.scalings.begin(), options.scalings.end(),
                                Scaling::treat) != options.scalings.end();
    if (want_treat) {
        Eigen::MatrixXd X = cell_means_design(data.group, g, data.covariates);
        LinearFit fit = ols_fit(X, data.y);
        if (!(fit.sigma2 > 0.0))
            throw std::runtime_error("inference: zero residual variance (constant response)");
        Eigen::MatrixXd V = covariance(fit, options.vcov);
        Eigen::MatrixXd infl = influence_contributions(fit, options.vcov);
        std::vector<std::string> prefixes;
        ContrastMatrix cm = contrasts_for(design, options.ctype, &prefixes);
        for (Eigen::Index r = 0; r < cm.rows(); ++r) {
            Eigen::VectorXd c = Eigen::VectorXd::Zero(X.cols());
            c.head(g) = cm.coefficients.row(r).transpose();
            MarginalModel m;
            m.label = prefixes[r] + cm.row_labels[r];
            m.estimate = c.dot(fit.coef);
            m.variance = c.dot(V * c);
            m.influence = infl * c;
            m.df = fit.df_residual;
            set.add(std::move(m));
        }
    }
    if (set.models.empty())
        throw std::invalid_argument("inference: no scalings requested");
    return set;
}

JointInference williams_mct(const GroupedData& data, const DoseDesign& design,
                            const InferenceOptions& options) {
    InferenceOptions opts = options;
    opts.scalings = {Scaling::treat};
    opts.ctype = options.ctype;
    MarginalSet set = linear_marginal_set(data, design, opts);
    JointInference inf = max_t_test(set, opts.alternative, opts.alpha, opts.df_rule,
                                    opts.mvt_tol, opts.seed);
    return opts.with_bounds ? simultaneous_bounds(std::move(inf)) : inf;
}

JointInference tukey_williams_joint(const GroupedData& data, const DoseDesign& design,
                                    const InferenceOptions& options) {
    MarginalSet set = linear_marginal_set(data, design, options);
    JointInference inf = max_t_test(set, options.alternative, options.alpha,
                                    options.df_rule, options.mvt_tol, options.seed);
    return options.with_bounds ? simultaneous_bounds(std::move(inf)) : inf;
}

MarginalSet glm_marginal_set(const GlmTrendData& data, const DoseDesign& design,
                             const Family& family, const InferenceOptions& options) {
    design.validate();
    const auto n = data.y.size();
    if (static_cast<std::size_t>(n) != data.group.size())
        throw std::invalid_argument("glm data: response/group length mismatch");
    const int g = design.groups();
    for (int gi : data.group)
        if (gi < 0 || gi >= g)
            throw std::invalid_argument("glm data: group index out of range");

    DoseMetameters met = dose_metameters(design);
    Eigen::MatrixXd covs = data.covariates;
    MarginalSet set;

    auto marginal_from = [&](const Eigen::MatrixXd& X, const Eigen::VectorXd& sel,
                             const std::string& label) {
        GlmFit fit = irls_fit(X, data.y, data.trials, data.prior_weights, family);
        Eigen::MatrixXd V;
        switch (options.vcov) {
            case VcovFlavor::classic: V = fit.working_covariance; break;
            default: V = fit.influence.transpose() * fit.influence; break;
        }
        MarginalModel m;
        m.label = label;
        m.estimate = sel.dot(fit.coef);
        m.variance = sel.dot(V * sel);
        m.influence = fit.influence * sel;
        m.df = family.dispersion_mode == DispersionMode::pearson ? fit.df_residual : 0;
        set.add(std::move(m));
    };

    for (Scaling s : options.scalings) {
        if (s == Scaling::treat) continue;
        Eigen::MatrixXd X = regression_design(data.group, metameter_scores(met, s), covs);
        Eigen::VectorXd sel = Eigen::VectorXd::Zero(X.cols());
        sel[1] = 1.0;
        marginal_from(X, sel, scaling_label(s));
    }

    bool want_treat = std::find(options.scalings.begin(), options.scalings.end(),
                                Scaling::treat) != options.scalings.end();
    if (want_treat) {
        Eigen::MatrixXd X = cell_means_design(data.group, g, covs);
        std::vector<std::string> prefixes;
        ContrastMatrix cm = contrasts_for(design, options.ctype, &prefixes);
        for (Eigen::Index r = 0; r < cm.rows(); ++r) {
            Eigen::VectorXd sel = Eigen::VectorXd::Zero(X.cols());
            sel.head(g) = cm.coefficients.row(r).transpose();
            marginal_from(X, sel, prefixes[r] + cm.row_labels[r]);
        }
    }
    if (set.models.empty())
        throw std::invalid_argument("inference: no scalings requested");
    return set;
}

JointInference tukey_williams_glm(const GlmTrendData& data, const DoseDesign& design,
                                  const Family& family, const InferenceOptions& options) {
    MarginalSet set = glm_marginal_set(data, design, family, options);
    JointInference inf = max_t_test(set, options.alternative, options.alpha,
                                    options.df_rule, options.mvt_tol, options.seed);
    return options.with_bounds ? simultaneous_bounds(std::move(inf)) : inf;
}

} // namespace trendkit
