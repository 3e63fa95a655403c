#include "trendkit/mvt.hpp"
#include "trendkit/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace trendkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Gauss-Legendre nodes on [-1,1], computed once per order by Newton iteration.
struct GaussRule {
    std::vector<double> x, w;
};

GaussRule make_gauss_legendre(int n) {
    GaussRule rule;
    rule.x.resize(n);
    rule.w.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            double z1 = z;
            z = z1 - p1 / pp;
            if (std::fabs(z - z1) < 1e-15) break;
        }
        rule.x[i] = -z;
        rule.x[n - 1 - i] = z;
        rule.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        rule.w[n - 1 - i] = rule.w[i];
    }
    return rule;
}

const GaussRule& gauss48() {
    static const GaussRule rule = make_gauss_legendre(48);
    return rule;
}

double sign_of(double x) { return x >= 0.0 ? 1.0 : -1.0; }

} // namespace

namespace detail {

// ---------------------------------------------------------------------------
// Bivariate normal CDF via the Drezner integral in sin-theta form:
//   P(X<=h, Y<=k) = Phi(h)Phi(k)
//     + 1/(2 pi) \int_0^{asin r} exp(-(h^2+k^2-2hk sin t)/(2 cos^2 t)) dt
// The integrand is analytic; a composite rule refined toward the upper
// endpoint keeps the boundary layer at |r| -> 1 resolved.
double bvn_cdf(double h, double k, double r) {
    if (std::isnan(h) || std::isnan(k)) return std::numeric_limits<double>::quiet_NaN();
    if (h == kInf && k == kInf) return 1.0;
    if (h == -kInf || k == -kInf) return 0.0;
    if (h == kInf) return norm_cdf(k);
    if (k == kInf) return norm_cdf(h);
    if (r > 1.0 - 1e-12) return norm_cdf(std::min(h, k));
    if (r < -1.0 + 1e-12) return std::max(0.0, norm_cdf(h) + norm_cdf(k) - 1.0);
    if (r == 0.0) return norm_cdf(h) * norm_cdf(k);

    const double asr = std::asin(r);
    const double hk = h * k;
    const double hs = 0.5 * (h * h + k * k);
    const GaussRule& g = gauss48();

    // split [0, asr] into segments, geometrically refined toward asr when
    // |r| is close to 1
    std::vector<double> knots{0.0};
    if (std::fabs(r) > 0.9) {
        knots.push_back(0.5 * asr);
        knots.push_back(0.9 * asr);
        knots.push_back(0.99 * asr);
        knots.push_back(0.999 * asr);
    }
    knots.push_back(asr);

    double integral = 0.0;
    for (std::size_t seg = 0; seg + 1 < knots.size(); ++seg) {
        const double a = knots[seg], b = knots[seg + 1];
        const double c1 = 0.5 * (b - a), c2 = 0.5 * (b + a);
        double acc = 0.0;
        for (std::size_t i = 0; i < g.x.size(); ++i) {
            double sn = std::sin(c1 * g.x[i] + c2);
            acc += g.w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
        }
        integral += acc * c1;
    }
    double p = norm_cdf(h) * norm_cdf(k) + integral / (2.0 * M_PI);
    return std::min(1.0, std::max(0.0, p));
}

// ---------------------------------------------------------------------------
// Bivariate t CDF, central, integer df, by the Dunnett-Sobel (1954) series.
double bvt_cdf(double h, double k, double r, int nu) {
    if (nu < 1) return bvn_cdf(h, k, r);
    if (h == kInf && k == kInf) return 1.0;
    if (h == -kInf || k == -kInf) return 0.0;
    if (h == kInf) return t_cdf(k, nu);
    if (k == kInf) return t_cdf(h, nu);
    const double eps = 1e-14;
    if (1.0 - r < eps) return t_cdf(std::min(h, k), nu);
    if (1.0 + r < eps) return h > -k ? t_cdf(h, nu) - t_cdf(-k, nu) : 0.0;

    const double pi = M_PI, tpi = 2.0 * pi;
    const double ors = 1.0 - r * r;
    const double hrk = h - r * k;
    const double krh = k - r * h;
    double xnhk = 0.0, xnkh = 0.0;
    if (std::fabs(hrk) + ors > 0.0) {
        xnhk = hrk * hrk / (hrk * hrk + ors * (nu + k * k));
        xnkh = krh * krh / (krh * krh + ors * (nu + h * h));
    }
    const double hs = sign_of(h - r * k);
    const double ks = sign_of(k - r * h);
    double bvt;
    if (nu % 2 == 0) {
        bvt = std::atan2(std::sqrt(ors), -r) / tpi;
        double gmph = h / std::sqrt(16.0 * (nu + h * h));
        double gmpk = k / std::sqrt(16.0 * (nu + k * k));
        double btnckh = 2.0 * std::atan2(std::sqrt(xnkh), std::sqrt(1.0 - xnkh)) / pi;
        double btpdkh = 2.0 * std::sqrt(xnkh * (1.0 - xnkh)) / pi;
        double btnchk = 2.0 * std::atan2(std::sqrt(xnhk), std::sqrt(1.0 - xnhk)) / pi;
        double btpdhk = 2.0 * std::sqrt(xnhk * (1.0 - xnhk)) / pi;
        for (int j = 1; j <= nu / 2; ++j) {
            bvt += gmph * (1.0 + ks * btnckh);
            bvt += gmpk * (1.0 + hs * btnchk);
            btnckh += btpdkh;
            btpdkh = 2.0 * j * btpdkh * (1.0 - xnkh) / (2.0 * j + 1.0);
            btnchk += btpdhk;
            btpdhk = 2.0 * j * btpdhk * (1.0 - xnhk) / (2.0 * j + 1.0);
            gmph *= (j - 0.5) / (j * (1.0 + h * h / nu));
            gmpk *= (j - 0.5) / (j * (1.0 + k * k / nu));
        }
    } else {
        const double qhrk = std::sqrt(h * h + k * k - 2.0 * r * h * k + nu * ors);
        const double hkrn = h * k + r * nu;
        const double hkn = h * k - nu;
        const double hpk = h + k;
        const double snu = std::sqrt(static_cast<double>(nu));
        bvt = std::atan2(-snu * (hkn * qhrk + hpk * hkrn),
                         hkn * hkrn - nu * hpk * qhrk) / tpi;
        if (bvt < -eps) bvt += 1.0;
        double gmph = h / (tpi * snu * (1.0 + h * h / nu));
        double gmpk = k / (tpi * snu * (1.0 + k * k / nu));
        double btnckh = std::sqrt(xnkh);
        double btpdkh = btnckh;
        double btnchk = std::sqrt(xnhk);
        double btpdhk = btnchk;
        for (int j = 1; j <= (nu - 1) / 2; ++j) {
            bvt += gmph * (1.0 + ks * btnckh);
            bvt += gmpk * (1.0 + hs * btnchk);
            btpdkh = (2.0 * j - 1.0) * btpdkh * (1.0 - xnkh) / (2.0 * j);
            btnckh += btpdkh;
            btpdhk = (2.0 * j - 1.0) * btpdhk * (1.0 - xnhk) / (2.0 * j);
            btnchk += btpdhk;
            gmph *= j / ((j + 0.5) * (1.0 + h * h / nu));
            gmpk *= j / ((j + 0.5) * (1.0 + k * k / nu));
        }
    }
    return std::min(1.0, std::max(0.0, bvt));
}

Eigen::MatrixXd repair_correlation(const Eigen::MatrixXd& R) {
    const auto q = R.rows();
    if (R.cols() != q || q < 1)
        throw std::invalid_argument("mvt: correlation matrix must be square");
    Eigen::MatrixXd S = 0.5 * (R + R.transpose());
    if ((S - R).cwiseAbs().maxCoeff() > 1e-8)
        throw std::invalid_argument("mvt: correlation matrix must be symmetric");
    for (Eigen::Index i = 0; i < q; ++i) {
        if (std::fabs(S(i, i) - 1.0) > 1e-8)
            throw std::invalid_argument("mvt: correlation matrix must have unit diagonal");
        S(i, i) = 1.0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
    const double min_ev = eig.eigenvalues().minCoeff();
    if (min_ev < -1e-8)
        throw std::invalid_argument("mvt: correlation matrix is not positive semidefinite");
    if (min_ev < 0.0) {
        Eigen::VectorXd ev = eig.eigenvalues().cwiseMax(0.0);
        S = eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
        Eigen::VectorXd d = S.diagonal().cwiseMax(1e-300).cwiseSqrt();
        S = d.cwiseInverse().asDiagonal() * S * d.cwiseInverse().asDiagonal();
        S = 0.5 * (S + S.transpose());
        S.diagonal().setOnes();
    }
    return S;
}

} // namespace detail

namespace {

// Cholesky for positive semidefinite matrices: zero pivots produce a zero
// column so degenerate coordinates are carried along deterministically.
bool psd_cholesky(const Eigen::MatrixXd& A, Eigen::MatrixXd& L) {
    const auto n = A.rows();
    L = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double d = A(j, j);
        for (Eigen::Index k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
        if (d > 1e-12) {
            L(j, j) = std::sqrt(d);
            for (Eigen::Index i = j + 1; i < n; ++i) {
                double s = A(i, j);
                for (Eigen::Index k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
                L(i, j) = s / L(j, j);
            }
        } else if (d > -1e-8) {
            // rank-deficient direction: coordinate is a linear combination
            // of its predecessors
            L(j, j) = 0.0;
        } else {
            return false;
        }
    }
    return true;
}

struct PreparedRect {
    Eigen::MatrixXd L;
    Eigen::VectorXd lo, up;
    int q = 0;
    int df = 0;
};

// integrand for one QMC point w (dim values in [0,1])
double rect_sample(const PreparedRect& p, const double* w) {
    const int q = p.q;
    double s = 1.0;
    int base = 0;
    if (p.df > 0) {
        double u0 = std::min(std::max(w[0], 1e-15), 1.0 - 1e-15);
        s = std::sqrt(chisq_quantile(u0, p.df) / p.df);
        base = 1;
    }
    double prod = 1.0;
    double y[128];
    for (int i = 0; i < q; ++i) {
        double v = 0.0;
        for (int j = 0; j < i; ++j) v += p.L(i, j) * y[j];
        const double lii = p.L(i, i);
        if (lii > 0.0) {
            double fa = 0.0, fb = 1.0;
            if (p.lo[i] > -kInf) fa = norm_cdf((s * p.lo[i] - v) / lii);
            if (p.up[i] < kInf) fb = norm_cdf((s * p.up[i] - v) / lii);
            const double d = fb - fa;
            if (d <= 0.0) return 0.0;
            prod *= d;
            if (i < q - 1) {
                double u = std::min(std::max(w[base + i], 1e-15), 1.0 - 1e-15);
                double t = fa + u * d;
                t = std::min(std::max(t, 1e-300), 1.0 - 1e-16);
                y[i] = norm_quantile(t);
            } else {
                y[i] = 0.0;
            }
        } else {
            if (p.lo[i] > -kInf && v < s * p.lo[i]) return 0.0;
            if (p.up[i] < kInf && v > s * p.up[i]) return 0.0;
            y[i] = 0.0;
        }
    }
    return prod;
}

std::vector<double> richtmyer_generators(int dim) {
    // fractional parts of square roots of the first `dim` primes
    std::vector<int> primes;
    for (int c = 2; static_cast<int>(primes.size()) < dim; ++c) {
        bool is_prime = true;
        for (int p : primes) {
            if (p * p > c) break;
            if (c % p == 0) { is_prime = false; break; }
        }
        if (is_prime) primes.push_back(c);
    }
    std::vector<double> z(dim);
    for (int j = 0; j < dim; ++j) {
        double r = std::sqrt(static_cast<double>(primes[j]));
        z[j] = r - std::floor(r);
    }
    return z;
}

MvtResult qmc_rectangle(const PreparedRect& prep, double tol,
                        std::uint64_t seed, std::size_t max_points) {
    const int dim = (prep.df > 0 ? 1 : 0) + std::max(0, prep.q - 1);
    const int n_random = 12;
    const std::vector<double> gen = richtmyer_generators(dim);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    MvtResult result;
    std::size_t total = 0;
    std::size_t n_points = 1024;
    std::vector<double> shift(dim), w(dim), means(n_random);

    while (true) {
        for (int m = 0; m < n_random; ++m) {
            for (int j = 0; j < dim; ++j) shift[j] = unif(rng);
            double acc = 0.0;
            for (std::size_t n = 1; n <= n_points; ++n) {
                for (int j = 0; j < dim; ++j) {
                    double x = n * gen[j] + shift[j];
                    x -= std::floor(x);
                    w[j] = std::fabs(2.0 * x - 1.0);  // baker transform
                }
                acc += rect_sample(prep, w.data());
            }
            means[m] = acc / static_cast<double>(n_points);
        }
        total += n_points * n_random;
        double mean = std::accumulate(means.begin(), means.end(), 0.0) / n_random;
        double var = 0.0;
        for (double v : means) var += (v - mean) * (v - mean);
        var /= (n_random - 1.0);
        double err = 3.0 * std::sqrt(var / n_random);
        result.probability = std::min(1.0, std::max(0.0, mean));
        result.error_estimate = err;
        result.points_used = total;
        if (err <= tol) return result;
        if (total + 4 * n_points * n_random > max_points)
            throw MvtAccuracyError(result.probability, err, total);
        n_points *= 4;
    }
}

// deterministic low-dimensional rectangles
double rect_q1(double lo, double up, int df) {
    auto cdf = [&](double x) {
        if (x == kInf) return 1.0;
        if (x == -kInf) return 0.0;
        return df > 0 ? t_cdf(x, df) : norm_cdf(x);
    };
    return std::max(0.0, cdf(up) - cdf(lo));
}

double rect_q2(double lo1, double up1, double lo2, double up2, double r, int df) {
    auto cdf2 = [&](double a, double b) {
        return df > 0 ? detail::bvt_cdf(a, b, r, df) : detail::bvn_cdf(a, b, r);
    };
    double p = cdf2(up1, up2);
    if (lo1 > -kInf) p -= cdf2(lo1, up2);
    if (lo2 > -kInf) p -= cdf2(up1, lo2);
    if (lo1 > -kInf && lo2 > -kInf) p += cdf2(lo1, lo2);
    return std::min(1.0, std::max(0.0, p));
}

} // namespace

MvtAccuracyError::MvtAccuracyError(double estimate, double error, std::size_t points)
    : std::runtime_error("mvt: error target not reached within the point budget"),
      best_estimate(estimate), achieved_error(error), points_used(points) {}

MvtResult mvt_cdf(const MvtProblem& problem) {
    const auto q = problem.upper.size();
    if (q < 1) throw std::invalid_argument("mvt: empty bound vector");
    if (q > 120) throw std::invalid_argument("mvt: dimension too large");
    if (!(problem.tol > 0.0)) throw std::invalid_argument("mvt: tol must be positive");
    if (problem.df < 0) throw std::invalid_argument("mvt: df must be >= 0");
    Eigen::VectorXd lo = problem.lower;
    if (lo.size() == 0) lo = Eigen::VectorXd::Constant(q, -kInf);
    if (lo.size() != q)
        throw std::invalid_argument("mvt: lower/upper size mismatch");
    for (Eigen::Index i = 0; i < q; ++i) {
        if (std::isnan(problem.upper[i]) || std::isnan(lo[i]))
            throw std::invalid_argument("mvt: NaN bound");
        if (lo[i] >= problem.upper[i])
            return MvtResult{0.0, 0.0, 0};
    }

    if (q == 1)
        return MvtResult{rect_q1(lo[0], problem.upper[0], problem.df), 1e-12, 0};

    Eigen::MatrixXd R = detail::repair_correlation(problem.R);
    if (R.rows() != q) throw std::invalid_argument("mvt: R dimension mismatch");

    if (q == 2)
        return MvtResult{
            rect_q2(lo[0], problem.upper[0], lo[1], problem.upper[1], R(0, 1), problem.df),
            1e-12, 0};

    // sort variables by expected truncation mass, narrowest first
    std::vector<int> order(q);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> width(q);
    for (Eigen::Index i = 0; i < q; ++i) {
        double fb = problem.upper[i] < kInf ? norm_cdf(problem.upper[i]) : 1.0;
        double fa = lo[i] > -kInf ? norm_cdf(lo[i]) : 0.0;
        width[i] = fb - fa;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return width[a] < width[b]; });

    PreparedRect prep;
    prep.q = static_cast<int>(q);
    prep.df = problem.df;
    prep.lo.resize(q);
    prep.up.resize(q);
    Eigen::MatrixXd Rs(q, q);
    for (Eigen::Index i = 0; i < q; ++i) {
        prep.lo[i] = lo[order[i]];
        prep.up[i] = problem.upper[order[i]];
        for (Eigen::Index j = 0; j < q; ++j) Rs(i, j) = R(order[i], order[j]);
    }
    if (!psd_cholesky(Rs, prep.L)) {
        Rs = detail::repair_correlation(Rs);
        if (!psd_cholesky(Rs, prep.L))
            throw std::invalid_argument("mvt: correlation matrix is not positive semidefinite");
    }
    return qmc_rectangle(prep, problem.tol, problem.seed, problem.max_points);
}

double equicoordinate_quantile(double alpha, const Eigen::MatrixXd& R, int df,
                               bool two_sided, double tol, std::uint64_t seed) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("equicoordinate_quantile: alpha must lie in (0,1)");
    const auto q = R.rows();
    const double level = 1.0 - alpha;
    auto tq = [&](double p) { return df > 0 ? t_quantile(p, df) : norm_quantile(p); };

    if (q == 1) return two_sided ? tq(1.0 - alpha / 2.0) : tq(level);

    MvtProblem prob;
    prob.R = R;
    prob.df = df;
    prob.tol = std::min(tol, 1e-4);
    prob.seed = seed;  // common random numbers keep the objective monotone in c
    auto eval = [&](double c) {
        prob.upper = Eigen::VectorXd::Constant(q, c);
        if (two_sided)
            prob.lower = Eigen::VectorXd::Constant(q, -c);
        else
            prob.lower.resize(0);
        return mvt_cdf(prob).probability - level;
    };

    // univariate and Bonferroni quantiles bracket the root
    double a = two_sided ? std::max(0.0, tq(1.0 - alpha / 2.0)) : tq(level);
    double b = two_sided ? tq(1.0 - alpha / (2.0 * static_cast<double>(q)))
                         : tq(1.0 - alpha / static_cast<double>(q));
    double fa = eval(a);
    if (std::fabs(fa) <= tol && a <= b) {
        // may already sit on the root (e.g. strongly dependent coordinates)
        if (fa >= 0.0) return a;
    }
    double fb = eval(b);
    for (int guard = 0; guard < 8 && fb < 0.0; ++guard) {
        b += 0.5 * (b - a) + 0.1;
        fb = eval(b);
    }
    if (fa > 0.0) {
        for (int guard = 0; guard < 8 && fa > 0.0; ++guard) {
            a -= 0.5 * (b - a) + 0.1;
            fa = eval(a);
        }
    }
    if (fa > 0.0 || fb < 0.0)
        throw std::runtime_error("equicoordinate_quantile: failed to bracket the root");

    // bisection with secant acceleration; objective is monotone under CRN
    double c = 0.5 * (a + b), fc = eval(c);
    for (int it = 0; it < 80; ++it) {
        if (std::fabs(fc) <= tol) return c;
        if (fc > 0.0) { b = c; fb = fc; }
        else { a = c; fa = fc; }
        double secant = (std::fabs(fb - fa) > 1e-300)
                            ? a - fa * (b - a) / (fb - fa)
                            : 0.5 * (a + b);
        c = (secant > a && secant < b) ? secant : 0.5 * (a + b);
        if (b - a < 1e-9) return 0.5 * (a + b);
        fc = eval(c);
    }
    return c;
}

} // namespace trendkit
