#include "trendkit/polyk.hpp"
#include "trendkit/mmm.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace trendkit {

double PolyKData::resolved_t_max() const {
    if (t_max > 0.0) return t_max;
    double m = 0.0;
    for (const auto& r : records) m = std::max(m, r.time);
    return m;
}

void PolyKData::validate() const {
    if (records.empty()) throw std::invalid_argument("polyk: no records");
    const double tm = resolved_t_max();
    if (!(tm > 0.0)) throw std::invalid_argument("polyk: study duration must be positive");
    for (const auto& r : records) {
        if (!(r.time > 0.0))
            throw std::invalid_argument("polyk: time of death must be positive");
        if (r.time > tm)
            throw std::invalid_argument("polyk: time of death exceeds study duration");
        if (r.tumor != 0 && r.tumor != 1)
            throw std::invalid_argument("polyk: tumor status must be 0 or 1");
        if (r.dose < 0.0)
            throw std::invalid_argument("polyk: dose must be non-negative");
    }
}

DoseDesign PolyKData::design() const {
    validate();
    std::map<double, int> counts;
    for (const auto& r : records) counts[r.dose] += 1;
    std::vector<double> doses;
    std::vector<int> n;
    for (const auto& [dose, count] : counts) {
        doses.push_back(dose);
        n.push_back(count);
    }
    return DoseDesign::from_doses(std::move(doses), std::move(n));
}

Eigen::VectorXd poly_k_weights(const PolyKData& data, double k) {
    data.validate();
    if (!(k > 0.0)) throw std::invalid_argument("polyk: k must be positive");
    const double tm = data.resolved_t_max();
    Eigen::VectorXd w(static_cast<Eigen::Index>(data.records.size()));
    for (std::size_t i = 0; i < data.records.size(); ++i) {
        const auto& r = data.records[i];
        w[static_cast<Eigen::Index>(i)] =
            r.tumor == 1 ? 1.0 : std::pow(r.time / tm, k);
    }
    return w;
}

std::vector<PolyKGroupSummary> adjusted_counts(const PolyKData& data, double k) {
    Eigen::VectorXd w = poly_k_weights(data, k);
    std::map<double, PolyKGroupSummary> groups;
    for (std::size_t i = 0; i < data.records.size(); ++i) {
        const auto& r = data.records[i];
        auto& g = groups[r.dose];
        g.dose = r.dose;
        g.n += 1;
        g.tumors += r.tumor;
        g.adjusted_n += w[static_cast<Eigen::Index>(i)];
    }
    std::vector<PolyKGroupSummary> out;
    for (auto& [dose, g] : groups) {
        if (g.adjusted_n <= 0.0)
            throw std::runtime_error("polyk: adjusted sample size is zero for dose " +
                                     format_dose(dose));
        g.adjusted_p = g.tumors / g.adjusted_n;
        out.push_back(g);
    }
    return out;
}

JointInference polyk_trend(const PolyKData& data, const std::vector<double>& k_values,
                           const InferenceOptions& options) {
    if (k_values.empty()) throw std::invalid_argument("polyk: at least one k required");
    DoseDesign design = data.design();

    GlmTrendData glm_data;
    const auto n = static_cast<Eigen::Index>(data.records.size());
    glm_data.y.resize(n);
    glm_data.group.resize(data.records.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = data.records[static_cast<std::size_t>(i)];
        glm_data.y[i] = r.tumor;
        auto it = std::lower_bound(design.doses.begin(), design.doses.end(), r.dose);
        glm_data.group[static_cast<std::size_t>(i)] =
            static_cast<int>(it - design.doses.begin());
    }

    std::vector<MarginalSet> sets;
    std::vector<std::string> names;
    for (double k : k_values) {
        glm_data.prior_weights = poly_k_weights(data, k);
        sets.push_back(glm_marginal_set(glm_data, design, Family::binomial_identity(),
                                        options));
        names.push_back("poly" + format_dose(k));
    }
    MarginalSet family = k_values.size() == 1 ? sets[0] : combine(sets, names);
    JointInference inf = max_t_test(family, options.alternative, options.alpha,
                                    options.df_rule, options.mvt_tol, options.seed);
    return options.with_bounds ? simultaneous_bounds(std::move(inf)) : inf;
}

} // namespace trendkit
