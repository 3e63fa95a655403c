#include "trendkit/glm.hpp"

#include <cmath>
#include <stdexcept>

namespace trendkit {

void Family::validate() const {
    if (kind == FamilyKind::binomial && link == LinkKind::log_link)
        throw std::invalid_argument("glm: binomial supports logit or identity link");
    if (kind == FamilyKind::poisson && link != LinkKind::log_link)
        throw std::invalid_argument("glm: poisson supports the log link only");
}

Family Family::binomial_logit() { return {FamilyKind::binomial, LinkKind::logit, DispersionMode::fixed_1}; }
Family Family::binomial_identity() { return {FamilyKind::binomial, LinkKind::identity, DispersionMode::fixed_1}; }
Family Family::poisson_log() { return {FamilyKind::poisson, LinkKind::log_link, DispersionMode::fixed_1}; }

namespace {

double link_eval(LinkKind link, double mu) {
    switch (link) {
        case LinkKind::logit: return std::log(mu / (1.0 - mu));
        case LinkKind::identity: return mu;
        case LinkKind::log_link: return std::log(mu);
    }
    return 0.0;
}

double link_inverse(LinkKind link, double eta) {
    switch (link) {
        case LinkKind::logit: return 1.0 / (1.0 + std::exp(-eta));
        case LinkKind::identity: return eta;
        case LinkKind::log_link: return std::exp(eta);
    }
    return 0.0;
}

double mu_eta(LinkKind link, double eta) {  // d mu / d eta
    switch (link) {
        case LinkKind::logit: {
            double m = 1.0 / (1.0 + std::exp(-eta));
            return m * (1.0 - m);
        }
        case LinkKind::identity: return 1.0;
        case LinkKind::log_link: return std::exp(eta);
    }
    return 0.0;
}

double variance_fn(FamilyKind kind, double mu) {
    return kind == FamilyKind::binomial ? mu * (1.0 - mu) : mu;
}

bool mean_feasible(const Family& family, double mu) {
    if (family.kind == FamilyKind::binomial) return mu > 0.0 && mu < 1.0;
    return mu > 0.0;
}

double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }

// weighted least squares via QR on sqrt(W) X
Eigen::VectorXd wls_solve(const Eigen::MatrixXd& X, const Eigen::VectorXd& z,
                          const Eigen::VectorXd& w) {
    Eigen::VectorXd sw = w.cwiseMax(0.0).cwiseSqrt();
    Eigen::MatrixXd Xw = sw.asDiagonal() * X;
    Eigen::VectorXd zw = sw.cwiseProduct(z);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xw);
    qr.setThreshold(1e-10);
    if (qr.rank() < X.cols()) {
        const auto perm = qr.colsPermutation().indices();
        throw std::invalid_argument("glm: working design is rank deficient (column " +
                                    std::to_string(perm[qr.rank()]) + ")");
    }
    return qr.solve(zw);
}

} // namespace

GlmFit irls_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                const Eigen::VectorXd& trials_in, const Eigen::VectorXd& prior_weights_in,
                const Family& family, int max_iter, double tol) {
    family.validate();
    const auto n = X.rows();
    const auto p = X.cols();
    if (y.size() != n) throw std::invalid_argument("glm: response length mismatch");

    Eigen::VectorXd trials = trials_in.size() ? trials_in : Eigen::VectorXd::Ones(n);
    Eigen::VectorXd pw = prior_weights_in.size() ? prior_weights_in : Eigen::VectorXd::Ones(n);
    if (trials.size() != n || pw.size() != n)
        throw std::invalid_argument("glm: trials/prior_weights length mismatch");
    if ((pw.array() < 0.0).any())
        throw std::invalid_argument("glm: prior weights must be non-negative");

    // response on the mean scale and total unit weight
    Eigen::VectorXd resp(n), wt(n);
    if (family.kind == FamilyKind::binomial) {
        for (Eigen::Index i = 0; i < n; ++i) {
            if (trials[i] <= 0.0)
                throw std::invalid_argument("glm: binomial trials must be positive");
            if (y[i] < 0.0 || y[i] > trials[i])
                throw std::invalid_argument("glm: binomial response outside [0, trials]");
            resp[i] = y[i] / trials[i];
            wt[i] = pw[i] * trials[i];
        }
    } else {
        for (Eigen::Index i = 0; i < n; ++i) {
            if (y[i] < 0.0)
                throw std::invalid_argument("glm: poisson response must be non-negative");
            resp[i] = y[i];
            wt[i] = pw[i];
        }
    }

    int n_used = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (pw[i] > 0.0) ++n_used;
    if (n_used <= p)
        throw std::invalid_argument("glm: need more weighted observations than parameters");

    // starting means away from the boundary
    Eigen::VectorXd mu(n), eta(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        mu[i] = family.kind == FamilyKind::binomial
                    ? (y[i] + 0.5) / (trials[i] + 1.0)
                    : resp[i] + 0.5;
        eta[i] = link_eval(family.link, mu[i]);
    }

    GlmFit fit;
    fit.X = X;
    fit.family = family;
    fit.df_residual = n_used - static_cast<int>(p);

    Eigen::VectorXd coef = Eigen::VectorXd::Zero(p);
    bool have_coef = false;
    Eigen::VectorXd w(n), z(n);

    for (int iter = 1; iter <= max_iter; ++iter) {
        fit.iterations = iter;
        for (Eigen::Index i = 0; i < n; ++i) {
            double d = mu_eta(family.link, eta[i]);
            double v = variance_fn(family.kind, mu[i]);
            if (v <= 0.0) v = 1e-10;
            w[i] = wt[i] * d * d / v;
            z[i] = eta[i] + (resp[i] - mu[i]) / (d == 0.0 ? 1e-10 : d);
        }
        Eigen::VectorXd coef_new = wls_solve(X, z, w);

        // step-halving keeps identity/log means feasible
        double step = 1.0;
        Eigen::VectorXd trial_coef = coef_new;
        for (int half = 0; half <= 20; ++half) {
            if (half > 0) {
                if (!have_coef)
                    throw std::runtime_error("glm: infeasible start under the requested link");
                step *= 0.5;
                trial_coef = coef + step * (coef_new - coef);
            }
            Eigen::VectorXd eta_try = X * trial_coef;
            bool ok = true;
            for (Eigen::Index i = 0; i < n; ++i) {
                double m = link_inverse(family.link, eta_try[i]);
                if (pw[i] > 0.0 && !mean_feasible(family, m)) { ok = false; break; }
            }
            if (ok) {
                eta = eta_try;
                for (Eigen::Index i = 0; i < n; ++i) mu[i] = link_inverse(family.link, eta[i]);
                break;
            }
            if (half == 20)
                throw std::runtime_error(
                    "glm: step-halving failed to keep fitted means feasible");
        }

        double delta = (trial_coef - coef).cwiseAbs().maxCoeff();
        double scale = std::max(1.0, coef.cwiseAbs().maxCoeff());
        coef = trial_coef;
        have_coef = true;
        if (iter > 1 && delta < tol * scale) {
            fit.converged = true;
            break;
        }
    }
    if (!fit.converged)
        throw std::runtime_error("glm: IRLS failed to converge after " +
                                 std::to_string(max_iter) + " iterations");

    fit.coef = coef;
    fit.mu = mu;

    // expected information A = X'WX with converged weights
    for (Eigen::Index i = 0; i < n; ++i) {
        double d = mu_eta(family.link, eta[i]);
        double v = variance_fn(family.kind, mu[i]);
        if (v <= 0.0) v = 1e-10;
        w[i] = wt[i] * d * d / v;
    }
    Eigen::MatrixXd A = X.transpose() * w.asDiagonal() * X;
    Eigen::MatrixXd A_inv = A.ldlt().solve(Eigen::MatrixXd::Identity(p, p));

    // influence rows: A^-1 * per-unit score
    fit.influence.resize(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        double d = mu_eta(family.link, eta[i]);
        double v = variance_fn(family.kind, mu[i]);
        if (v <= 0.0) v = 1e-10;
        double score_scale = wt[i] * (resp[i] - mu[i]) * d / v;
        fit.influence.row(i) = (A_inv * X.row(i).transpose()).transpose() * score_scale;
    }

    // deviance
    double dev = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (family.kind == FamilyKind::binomial) {
            dev += 2.0 * wt[i] * (xlogy(resp[i], resp[i] / mu[i]) +
                                  xlogy(1.0 - resp[i], (1.0 - resp[i]) / (1.0 - mu[i])));
        } else {
            dev += 2.0 * wt[i] * (xlogy(resp[i], resp[i] / mu[i]) - (resp[i] - mu[i]));
        }
    }
    fit.deviance = dev;

    // Pearson dispersion (always estimated; applied only in pearson mode)
    double pearson = 0.0;
    bool any_resid = false;
    for (Eigen::Index i = 0; i < n; ++i) {
        double v = variance_fn(family.kind, mu[i]);
        double r = resp[i] - mu[i];
        if (v <= 1e-12) {
            if (std::fabs(r) > 1e-8)
                throw std::runtime_error("glm: zero-variance fitted value with non-zero residual");
            continue;
        }
        if (std::fabs(r) > 1e-12) any_resid = true;
        pearson += wt[i] * r * r / v;
    }
    if (fit.df_residual >= 1) {
        fit.pearson_dispersion = pearson / fit.df_residual;
        fit.dispersion_degenerate = !any_resid;
    } else {
        fit.pearson_dispersion = 1.0;
        fit.dispersion_degenerate = true;
    }

    double phi = family.dispersion_mode == DispersionMode::pearson ? fit.pearson_dispersion : 1.0;
    fit.working_covariance = phi * A_inv;
    return fit;
}

std::pair<std::vector<double>, std::vector<double>>
add1_correction(const std::vector<double>& successes, const std::vector<double>& trials) {
    if (successes.size() != trials.size())
        throw std::invalid_argument("add1: length mismatch");
    std::vector<double> s2(successes), t2(trials);
    for (std::size_t i = 0; i < s2.size(); ++i) {
        if (successes[i] < 0.0 || successes[i] > trials[i])
            throw std::invalid_argument("add1: successes outside [0, trials]");
        s2[i] += 1.0;
        t2[i] += 2.0;
    }
    return {s2, t2};
}

double pearson_dispersion(const GlmFit& fit, const Eigen::VectorXd& y,
                          const Eigen::VectorXd& trials_in,
                          const Eigen::VectorXd& prior_weights_in) {
    const auto n = y.size();
    Eigen::VectorXd trials = trials_in.size() ? trials_in : Eigen::VectorXd::Ones(n);
    Eigen::VectorXd pw = prior_weights_in.size() ? prior_weights_in : Eigen::VectorXd::Ones(n);
    if (fit.df_residual < 1)
        throw std::invalid_argument("dispersion: residual degrees of freedom must be >= 1");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double resp = fit.family.kind == FamilyKind::binomial ? y[i] / trials[i] : y[i];
        double wt = fit.family.kind == FamilyKind::binomial ? pw[i] * trials[i] : pw[i];
        double v = variance_fn(fit.family.kind, fit.mu[i]);
        double r = resp - fit.mu[i];
        if (v <= 1e-12) {
            if (std::fabs(r) > 1e-8)
                throw std::runtime_error("dispersion: zero-variance fitted value");
            continue;
        }
        acc += wt * r * r / v;
    }
    return acc / fit.df_residual;
}

} // namespace trendkit
