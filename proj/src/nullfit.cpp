#include "fdrkit/nullfit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fdrkit/dist.hpp"
#include "fdrkit/rng.hpp"

namespace fdrkit {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
}

double NullModel::null_pdf(double z) const {
    return norm_pdf(z, delta0, sigma0);
}

double NullModel::null_cdf(double z) const {
    return norm_cdf((z - delta0) / sigma0);
}

NullModel theoretical_null(double p0) {
    NullModel m;
    m.delta0 = 0.0;
    m.sigma0 = 1.0;
    m.p0_raw = p0;
    m.method = NullMethod::Theoretical;
    return m;
}

NullModel geometric_null_from_grid(const std::vector<double>& x,
                                   const std::vector<double>& logf,
                                   const std::vector<double>& weights) {
    const std::size_t n = x.size();
    if (n < 3 || logf.size() != n || weights.size() != n)
        throw std::invalid_argument("geometric_null: bad grid");
    Eigen::Matrix3d xtwx = Eigen::Matrix3d::Zero();
    Eigen::Vector3d xtwy = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector3d row(1.0, x[i], x[i] * x[i]);
        xtwx += weights[i] * row * row.transpose();
        xtwy += weights[i] * logf[i] * row;
    }
    const Eigen::Vector3d beta = xtwx.ldlt().solve(xtwy);
    const double b0 = beta(0), b1 = beta(1), b2 = beta(2);
    if (b2 >= 0.0)
        throw std::runtime_error(
            "geometric_null: no central peak (log density convex near 0)");
    NullModel m;
    m.method = NullMethod::Geometric;
    m.sigma0 = 1.0 / std::sqrt(-2.0 * b2);
    m.delta0 = b1 * m.sigma0 * m.sigma0;
    const double log_p0 =
        b0 + 0.5 * (m.delta0 * m.delta0 / (m.sigma0 * m.sigma0) +
                    kLog2Pi + 2.0 * std::log(m.sigma0));
    m.p0_raw = std::exp(log_p0);
    return m;
}

NullModel geometric_null(const MixtureDensityFit& fit,
                         const BinnedHistogram& hist, double window) {
    if (!(window > 0.2 && window <= 0.9))
        throw std::invalid_argument("geometric_null: window in (0.2, 0.9]");
    // central window by cumulative counts
    const double lo_frac = 0.5 * (1.0 - window);
    const double hi_frac = 1.0 - lo_frac;
    const double n = static_cast<double>(hist.n);
    std::vector<double> x, logf, w;
    double cum = 0.0;
    for (std::size_t k = 0; k < hist.num_bins(); ++k) {
        const double mid_frac =
            (cum + 0.5 * static_cast<double>(hist.counts[k])) / n;
        cum += static_cast<double>(hist.counts[k]);
        if (hist.counts[k] == 0) continue;
        if (mid_frac < lo_frac || mid_frac > hi_frac) continue;
        x.push_back(hist.midpoints[k]);
        logf.push_back(std::log(fit.density(hist.midpoints[k])));
        w.push_back(static_cast<double>(hist.counts[k]));
    }
    if (x.size() < 3)
        throw std::runtime_error(
            "geometric_null: fewer than 3 usable central bins");
    return geometric_null_from_grid(x, logf, w);
}

namespace {

// Truncated-normal log-likelihood of the interior points and its
// gradient in (delta, sigma).
struct TruncNormLik {
    const std::vector<double>& zs;  // interior points
    double a, b;

    double value(double delta, double sigma) const {
        const double as = (a - delta) / sigma;
        const double bs = (b - delta) / sigma;
        const double p0 = norm_cdf(bs) - norm_cdf(as);
        if (p0 <= 0.0 || sigma <= 0.0) return -1e300;
        double ll = 0.0;
        for (double z : zs) {
            const double s = (z - delta) / sigma;
            ll += -0.5 * s * s - std::log(sigma);
        }
        ll -= static_cast<double>(zs.size()) * std::log(p0);
        return ll;
    }

    std::pair<double, double> gradient(double delta, double sigma) const {
        const double as = (a - delta) / sigma;
        const double bs = (b - delta) / sigma;
        const double p0 = norm_cdf(bs) - norm_cdf(as);
        const double pa = norm_pdf(as), pb = norm_pdf(bs);
        double sum_s = 0.0, sum_s2 = 0.0;
        for (double z : zs) {
            const double s = (z - delta) / sigma;
            sum_s += s;
            sum_s2 += s * s;
        }
        const double n0 = static_cast<double>(zs.size());
        const double gd = sum_s / sigma - n0 * (pa - pb) / (sigma * p0);
        const double gs = (sum_s2 - n0) / sigma -
                          n0 * (as * pa - bs * pb) / (sigma * p0);
        return {gd, gs};
    }
};

}  // namespace

AnalyticNullFit analytic_null(const ZSample& z,
                              std::optional<std::pair<double, double>>
                                  interval) {
    z.validate();
    std::vector<double> sorted = z.values;
    std::sort(sorted.begin(), sorted.end());
    double a, b;
    if (interval) {
        a = interval->first;
        b = interval->second;
    } else {
        const std::size_t n = sorted.size();
        a = sorted[static_cast<std::size_t>(0.25 * (n - 1))];
        b = sorted[static_cast<std::size_t>(0.75 * (n - 1))];
    }
    if (!(a < b)) throw std::invalid_argument("analytic_null: need a < b");

    std::vector<double> interior;
    for (double v : z.values)
        if (v >= a && v <= b) interior.push_back(v);
    const long n0 = static_cast<long>(interior.size());
    if (n0 == 0)
        throw std::runtime_error("analytic_null: no observations in [a,b]");
    if (n0 < 25)
        throw std::runtime_error(
            "analytic_null: fewer than 25 observations in [a,b]");
    const double first = interior.front();
    if (std::all_of(interior.begin(), interior.end(),
                    [&](double v) { return v == first; }))
        throw std::runtime_error(
            "analytic_null: all interior points identical");

    // init: interior moments, sd inflated for truncation
    double m = std::accumulate(interior.begin(), interior.end(), 0.0) / n0;
    double ss = 0.0;
    for (double v : interior) ss += (v - m) * (v - m);
    double sd = std::sqrt(ss / std::max<long>(n0 - 1, 1));
    // central-50% truncation shrinks the sd by about a factor 0.54
    double delta = m, sigma = sd / 0.54;

    TruncNormLik lik{interior, a, b};
    const double h = 1e-5;
    int iters = 0;
    bool converged = false;
    double cur = lik.value(delta, sigma);
    for (; iters < 200; ++iters) {
        auto [gd, gs] = lik.gradient(delta, sigma);
        if (std::max(std::fabs(gd), std::fabs(gs)) < 1e-8) {
            converged = true;
            break;
        }
        // finite-difference Hessian of the gradient
        auto [gd_d, gs_d] = lik.gradient(delta + h, sigma);
        auto [gd_s, gs_s] = lik.gradient(delta, sigma + h);
        const double h11 = (gd_d - gd) / h;
        const double h12 = 0.5 * ((gd_s - gd) / h + (gs_d - gs) / h);
        const double h22 = (gs_s - gs) / h;
        const double det = h11 * h22 - h12 * h12;
        double sd_step, ss_step;
        // Newton direction only when the Hessian is negative definite;
        // otherwise fall back to scaled steepest ascent.
        if (h11 < 0.0 && det > 0.0) {
            sd_step = -(h22 * gd - h12 * gs) / det;
            ss_step = -(-h12 * gd + h11 * gs) / det;
        } else {
            const double gn = std::hypot(gd, gs);
            sd_step = sigma * gd / gn;
            ss_step = sigma * gs / gn;
        }
        // backtracking line search: accept only uphill steps
        double t = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 50; ++ls, t *= 0.5) {
            const double nd = delta + t * sd_step;
            const double ns = sigma + t * ss_step;
            if (!(ns > 1e-4)) continue;
            const double nv = lik.value(nd, ns);
            if (nv > cur) {
                delta = nd;
                sigma = ns;
                cur = nv;
                moved = true;
                break;
            }
        }
        if (!moved) break;  // no ascent direction left; check gradient below
    }
    if (!converged) {
        auto [gd, gs] = lik.gradient(delta, sigma);
        if (std::max(std::fabs(gd), std::fabs(gs)) > 1e-4)
            throw std::runtime_error("analytic_null: optimizer did not converge");
    }

    AnalyticNullFit out;
    out.a = a;
    out.b = b;
    out.n0 = n0;
    out.theta = static_cast<double>(n0) / static_cast<double>(z.size());
    out.p0_interval_mass =
        norm_cdf((b - delta) / sigma) - norm_cdf((a - delta) / sigma);
    out.iterations = iters;
    out.model.method = NullMethod::Analytic;
    out.model.delta0 = delta;
    out.model.sigma0 = sigma;
    out.model.p0_raw = out.theta / out.p0_interval_mass;
    return out;
}

std::pair<double, double> preliminary_interval(const ZSample& z) {
    std::vector<double> s = z.values;
    std::sort(s.begin(), s.end());
    const std::size_t n = s.size();
    if (n < 4) throw std::invalid_argument("preliminary_interval: n < 4");
    const double med = 0.5 * (s[(n - 1) / 2] + s[n / 2]);
    const double q1 = s[static_cast<std::size_t>(0.25 * (n - 1))];
    const double q3 = s[static_cast<std::size_t>(0.75 * (n - 1))];
    // robust sd from the IQR of a normal; interval width shrinks slowly
    // with N so large samples lean on a narrower, safer center.
    const double rsd = (q3 - q1) / (2.0 * norm_quantile(0.75));
    const double c = n > 500000
                         ? 1.0
                         : 4.3 * std::exp(-0.26 * std::log10(static_cast<double>(n)));
    return {med - c * rsd, med + c * rsd};
}

RmsCorrelation estimate_rms_correlation(
    const std::vector<std::vector<double>>& matrix, std::uint64_t seed) {
    const std::size_t nrow = matrix.size();
    if (nrow < 2)
        throw std::invalid_argument("estimate_rms_correlation: need >= 2 rows");
    const std::size_t ncol = matrix[0].size();
    if (ncol < 3)
        throw std::invalid_argument(
            "estimate_rms_correlation: need >= 3 columns");
    for (const auto& r : matrix)
        if (r.size() != ncol)
            throw std::invalid_argument(
                "estimate_rms_correlation: ragged matrix");

    // column-standardize
    std::vector<std::vector<double>> x(nrow, std::vector<double>(ncol));
    for (std::size_t j = 0; j < ncol; ++j) {
        double m = 0.0;
        for (std::size_t i = 0; i < nrow; ++i) m += matrix[i][j];
        m /= nrow;
        double ss = 0.0;
        for (std::size_t i = 0; i < nrow; ++i)
            ss += (matrix[i][j] - m) * (matrix[i][j] - m);
        const double sd = std::sqrt(ss / (nrow > 1 ? nrow - 1 : 1));
        for (std::size_t i = 0; i < nrow; ++i)
            x[i][j] = sd > 0.0 ? (matrix[i][j] - m) / sd : matrix[i][j];
    }

    // per-row moments, skipping constant rows
    std::vector<double> rmean(nrow), rsd(nrow);
    std::vector<std::size_t> usable;
    long skipped = 0;
    for (std::size_t i = 0; i < nrow; ++i) {
        double m = std::accumulate(x[i].begin(), x[i].end(), 0.0) / ncol;
        double ss = 0.0;
        for (double v : x[i]) ss += (v - m) * (v - m);
        rmean[i] = m;
        rsd[i] = std::sqrt(ss);
        if (rsd[i] > 0.0)
            usable.push_back(i);
        else
            ++skipped;
    }
    if (usable.size() < 2)
        throw std::invalid_argument(
            "estimate_rms_correlation: fewer than 2 non-constant rows");

    auto rho = [&](std::size_t i, std::size_t j) {
        double dot = 0.0;
        for (std::size_t c = 0; c < ncol; ++c)
            dot += (x[i][c] - rmean[i]) * (x[j][c] - rmean[j]);
        return dot / (rsd[i] * rsd[j]);
    };

    const std::size_t m = usable.size();
    const long long total_pairs =
        static_cast<long long>(m) * static_cast<long long>(m - 1) / 2;
    constexpr long long kMaxPairs = 50000;
    double sum_r2 = 0.0;
    long sampled = 0;
    if (total_pairs <= kMaxPairs) {
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j) {
                const double r = rho(usable[i], usable[j]);
                sum_r2 += r * r;
                ++sampled;
            }
    } else {
        auto rng = substream(seed, 0);
        std::uniform_int_distribution<std::size_t> pick(0, m - 1);
        while (sampled < kMaxPairs) {
            const std::size_t i = pick(rng), j = pick(rng);
            if (i == j) continue;
            const double r = rho(usable[i], usable[j]);
            sum_r2 += r * r;
            ++sampled;
        }
    }

    RmsCorrelation out;
    out.pairs_sampled = sampled;
    out.rows_skipped = skipped;
    const double mean_r2 = sum_r2 / sampled;
    const double floor = 1.0 / (ncol - 1);
    out.alpha_raw = std::sqrt(mean_r2);
    out.alpha_bias_corrected = std::sqrt(std::max(0.0, mean_r2 - floor));
    out.sampling_floor = std::sqrt(floor);
    return out;
}

double dispersion_from_A(double a_variate) {
    const double v = 1.0 + std::sqrt(2.0) * a_variate;
    if (v <= 0.0)
        throw std::domain_error("dispersion_from_A: 1 + sqrt(2)*A <= 0");
    return std::sqrt(v);
}

}  // namespace fdrkit
