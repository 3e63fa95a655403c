#include "trendkit/design.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace trendkit {

int DoseDesign::total_n() const {
    int total = 0;
    for (int ni : n) total += ni;
    return total;
}

void DoseDesign::validate() const {
    if (doses.size() < 2)
        throw std::invalid_argument("design: at least 2 dose groups required");
    if (doses.size() != n.size() || doses.size() != labels.size())
        throw std::invalid_argument("design: doses, labels and n must have equal length");
    if (doses.front() < 0.0)
        throw std::invalid_argument("design: doses must be non-negative");
    for (std::size_t i = 1; i < doses.size(); ++i)
        if (!(doses[i] > doses[i - 1]))
            throw std::invalid_argument("design: doses must be strictly increasing");
    for (int ni : n)
        if (ni < 1) throw std::invalid_argument("design: every group needs n >= 1");
}

DoseDesign DoseDesign::from_doses(std::vector<double> doses, std::vector<int> n) {
    DoseDesign d;
    d.labels.reserve(doses.size());
    for (double dose : doses) d.labels.push_back(format_dose(dose));
    d.doses = std::move(doses);
    d.n = std::move(n);
    d.validate();
    return d;
}

void ContrastMatrix::validate() const {
    if (coefficients.rows() < 1)
        throw std::invalid_argument("contrast: at least one row required");
    if (static_cast<std::size_t>(coefficients.rows()) != row_labels.size())
        throw std::invalid_argument("contrast: label count mismatch");
    for (Eigen::Index r = 0; r < coefficients.rows(); ++r) {
        if (std::fabs(coefficients.row(r).sum()) > 1e-12)
            throw std::invalid_argument("contrast: row '" + row_labels[r] +
                                        "' does not sum to zero");
        if (coefficients.row(r).cwiseAbs().maxCoeff() == 0.0)
            throw std::invalid_argument("contrast: row '" + row_labels[r] + "' is all zero");
    }
}

std::string format_dose(double dose) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", dose);
    return buf;
}

ContrastMatrix williams_contrasts(const DoseDesign& design) {
    design.validate();
    const int k = design.k();
    ContrastMatrix cm;
    cm.coefficients = Eigen::MatrixXd::Zero(k, k + 1);
    for (int m = 1; m <= k; ++m) {
        auto& row = cm.coefficients;
        double pooled_n = 0.0;
        for (int g = k + 1 - m; g <= k; ++g) pooled_n += design.n[g];
        row(m - 1, 0) = -1.0;
        for (int g = k + 1 - m; g <= k; ++g)
            row(m - 1, g) = design.n[g] / pooled_n;
        std::string label;
        if (m == 1) {
            label = design.labels[k] + "-" + design.labels[0];
        } else {
            label = "(";
            for (int g = k; g >= k + 1 - m; --g) {
                if (g != k) label += "+";
                label += design.labels[g];
            }
            label += ")/" + std::to_string(m) + "-" + design.labels[0];
        }
        cm.row_labels.push_back(label);
    }
    cm.validate();
    return cm;
}

ContrastMatrix dunnett_contrasts(const DoseDesign& design) {
    design.validate();
    const int k = design.k();
    ContrastMatrix cm;
    cm.coefficients = Eigen::MatrixXd::Zero(k, k + 1);
    for (int g = 1; g <= k; ++g) {
        cm.coefficients(g - 1, 0) = -1.0;
        cm.coefficients(g - 1, g) = 1.0;
        cm.row_labels.push_back(design.labels[g] + "-" + design.labels[0]);
    }
    cm.validate();
    return cm;
}

ContrastMatrix combined_contrasts(const DoseDesign& design) {
    ContrastMatrix dunnett = dunnett_contrasts(design);
    ContrastMatrix williams = williams_contrasts(design);
    ContrastMatrix cm = dunnett;
    for (Eigen::Index r = 0; r < williams.rows(); ++r) {
        Eigen::VectorXd cand = williams.coefficients.row(r);
        Eigen::VectorXd cand_unit = cand / cand.norm();
        bool duplicate = false;
        for (Eigen::Index s = 0; s < cm.rows(); ++s) {
            Eigen::VectorXd have = cm.coefficients.row(s);
            have /= have.norm();
            if ((have - cand_unit).cwiseAbs().maxCoeff() < 1e-10) {
                duplicate = true;
                break;
            }
        }
        if (duplicate) continue;
        cm.coefficients.conservativeResize(cm.rows() + 1, Eigen::NoChange);
        cm.coefficients.row(cm.rows() - 1) = cand.transpose();
        cm.row_labels.push_back(williams.row_labels[r]);
    }
    cm.validate();
    return cm;
}

DoseMetameters dose_metameters(const DoseDesign& design) {
    design.validate();
    const int g = design.groups();
    DoseMetameters met;
    met.ari.resize(g);
    met.ord.resize(g);
    met.arilog.resize(g);
    for (int i = 0; i < g; ++i) {
        met.ari[i] = design.doses[i];
        met.ord[i] = static_cast<double>(i);
    }
    std::vector<double> log_doses(design.doses.begin(), design.doses.end());
    if (log_doses[0] == 0.0) {
        // keep log spacing: d0 <- d1^2/d2, or d1/10 with a single non-zero dose
        met.zero_replacement =
            g >= 3 ? log_doses[1] * log_doses[1] / log_doses[2] : log_doses[1] / 10.0;
        log_doses[0] = met.zero_replacement;
    }
    for (int i = 0; i < g; ++i) met.arilog[i] = std::log(log_doses[i]);
    return met;
}

} // namespace trendkit
