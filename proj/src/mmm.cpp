#include "trendkit/mmm.hpp"
#include "trendkit/mvt.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace trendkit {

void MarginalSet::add(MarginalModel model) {
    if (models.empty())
        unit_count = model.influence.size();
    else if (model.influence.size() != unit_count)
        throw std::invalid_argument("mmm: model '" + model.label +
                                    "' does not match the shared unit count");
    models.push_back(std::move(model));
}

void MarginalSet::validate() const {
    if (models.empty()) throw std::invalid_argument("mmm: empty marginal set");
    std::set<std::string> seen;
    for (const auto& m : models) {
        if (m.influence.size() != unit_count)
            throw std::invalid_argument("mmm: unit count mismatch for '" + m.label + "'");
        if (!(m.variance > 0.0))
            throw std::invalid_argument("mmm: non-positive variance for '" + m.label + "'");
        if (!seen.insert(m.label).second)
            throw std::invalid_argument("mmm: duplicate label '" + m.label + "'");
    }
}

Eigen::MatrixXd joint_correlation(const MarginalSet& set) {
    set.validate();
    const auto q = set.size();
    Eigen::VectorXd norms(q);
    for (Eigen::Index a = 0; a < q; ++a) {
        norms[a] = set.models[a].influence.norm();
        if (norms[a] <= 0.0)
            throw std::invalid_argument("mmm: degenerate influence for '" +
                                        set.models[a].label + "'");
    }
    Eigen::MatrixXd R(q, q);
    for (Eigen::Index a = 0; a < q; ++a) {
        R(a, a) = 1.0;
        for (Eigen::Index b = a + 1; b < q; ++b) {
            double v = set.models[a].influence.dot(set.models[b].influence) /
                       (norms[a] * norms[b]);
            R(a, b) = R(b, a) = std::min(1.0, std::max(-1.0, v));
        }
    }
    if (q == 1) return R;
    return detail::repair_correlation(R);
}

MarginalSet combine(const std::vector<MarginalSet>& sets,
                    const std::vector<std::string>& names) {
    if (sets.empty()) throw std::invalid_argument("mmm: nothing to combine");
    if (!names.empty() && names.size() != sets.size())
        throw std::invalid_argument("mmm: one name per set required");
    MarginalSet out;
    for (std::size_t s = 0; s < sets.size(); ++s) {
        sets[s].validate();
        if (s > 0 && sets[s].unit_count != out.unit_count)
            throw std::invalid_argument("mmm: unit count mismatch between combined sets");
        for (const auto& m : sets[s].models) {
            MarginalModel copy = m;
            if (!names.empty() && !names[s].empty())
                copy.label = names[s] + ": " + m.label;
            out.add(std::move(copy));
        }
    }
    return out;
}

} // namespace trendkit
