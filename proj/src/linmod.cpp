#include "trendkit/linmod.hpp"

#include <cmath>
#include <stdexcept>

namespace trendkit {

VcovFlavor parse_vcov(const std::string& name) {
    if (name == "classic") return VcovFlavor::classic;
    if (name == "hc0") return VcovFlavor::hc0;
    if (name == "hc3") return VcovFlavor::hc3;
    throw std::invalid_argument("unknown vcov flavor: " + name);
}

std::string vcov_name(VcovFlavor flavor) {
    switch (flavor) {
        case VcovFlavor::classic: return "classic";
        case VcovFlavor::hc0: return "hc0";
        case VcovFlavor::hc3: return "hc3";
    }
    return "?";
}

LinearFit ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    const auto n = X.rows();
    const auto p = X.cols();
    if (y.size() != n)
        throw std::invalid_argument("ols: response length does not match design rows");
    if (n <= p)
        throw std::invalid_argument("ols: need more observations than parameters");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < p) {
        // first pivoted-out column is part of the dependency
        const auto perm = qr.colsPermutation().indices();
        int offending = perm[qr.rank()];
        throw std::invalid_argument("ols: design matrix is rank deficient (column " +
                                    std::to_string(offending) + ")");
    }

    LinearFit fit;
    fit.X = X;
    fit.coef = qr.solve(y);
    fit.fitted = X * fit.coef;
    fit.residuals = y - fit.fitted;
    fit.df_residual = static_cast<int>(n - p);
    fit.sigma2 = fit.residuals.squaredNorm() / fit.df_residual;

    // (X'X)^-1 = P R^-1 R^-T P' from the pivoted QR
    Eigen::MatrixXd R = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
    Eigen::MatrixXd Rinv =
        R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
    Eigen::MatrixXd inv_permuted = Rinv * Rinv.transpose();
    const auto perm = qr.colsPermutation();
    fit.xtx_inv = perm * inv_permuted * perm.transpose();
    fit.xtx_inv = 0.5 * (fit.xtx_inv + fit.xtx_inv.transpose());
    return fit;
}

namespace {

Eigen::VectorXd leverage(const LinearFit& fit) {
    // h_ii = x_i' (X'X)^-1 x_i
    return ((fit.X * fit.xtx_inv).cwiseProduct(fit.X)).rowwise().sum();
}

} // namespace

Eigen::MatrixXd covariance(const LinearFit& fit, VcovFlavor flavor) {
    if (flavor == VcovFlavor::classic) return fit.sigma2 * fit.xtx_inv;
    Eigen::MatrixXd infl = influence_contributions(fit, flavor);
    return infl.transpose() * infl;
}

Eigen::MatrixXd influence_contributions(const LinearFit& fit, VcovFlavor flavor) {
    Eigen::VectorXd e = fit.residuals;
    if (flavor == VcovFlavor::hc3) {
        Eigen::VectorXd h = leverage(fit);
        for (Eigen::Index i = 0; i < e.size(); ++i) {
            double om = 1.0 - h[i];
            if (om < 1e-10)
                throw std::invalid_argument(
                    "hc3: unit " + std::to_string(i) + " has leverage 1");
            e[i] /= om;
        }
    }
    return e.asDiagonal() * (fit.X * fit.xtx_inv);
}

} // namespace trendkit
