#include "fdrkit/density.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fdrkit/dist.hpp"
#include "fdrkit/rng.hpp"

namespace fdrkit {

namespace {

// Natural cubic spline basis with `df` columns (intercept excluded),
// boundary knots at the ends of the standardized midpoint range.
// Truncated-power construction with the usual linearity constraints
// beyond the boundary knots.
std::vector<double> spline_knots(double lo, double hi, int df) {
    // df columns need df + 1 knots (including the two boundary knots)
    std::vector<double> knots(df + 1);
    for (int i = 0; i <= df; ++i)
        knots[i] = lo + (hi - lo) * i / df;
    return knots;
}

void spline_row(const std::vector<double>& knots, double x, double* out) {
    const int nk = static_cast<int>(knots.size());
    const double kb = knots[nk - 1];  // last knot
    const double ka = knots[nk - 2];  // second to last
    auto cube = [](double u) { return u > 0.0 ? u * u * u : 0.0; };
    auto d = [&](double knot) {
        return (cube(x - knot) - cube(x - kb)) / (kb - knot);
    };
    out[0] = x;
    for (int j = 0; j + 2 < nk; ++j)
        out[j + 1] = d(knots[j]) - d(ka);
}

Eigen::MatrixXd design_matrix(const MixtureDensityFit& spec,
                              const std::vector<double>& x) {
    const int k = static_cast<int>(x.size());
    const int p = static_cast<int>(spec.beta.empty()
                                       ? spec.degree + 1
                                       : spec.beta.size());
    Eigen::MatrixXd design(k, p);
    std::vector<double> row(p);
    for (int i = 0; i < k; ++i) {
        const double s = (x[i] - spec.center) / spec.scale;
        design(i, 0) = 1.0;
        if (spec.basis == Basis::Polynomial) {
            double pw = 1.0;
            for (int j = 1; j < p; ++j) {
                pw *= s;
                design(i, j) = pw;
            }
        } else {
            spline_row(spec.knots, s, row.data());
            for (int j = 1; j < p; ++j) design(i, j) = row[j - 1];
        }
    }
    return design;
}

double poisson_deviance(const std::vector<long>& y,
                        const Eigen::VectorXd& mu) {
    double dev = 0.0;
    for (int i = 0; i < mu.size(); ++i) {
        const double yi = static_cast<double>(y[i]);
        if (yi > 0.0) dev += yi * std::log(yi / mu(i));
        dev -= yi - mu(i);
    }
    return 2.0 * dev;
}

}  // namespace

double MixtureDensityFit::density(double z) const {
    const double s = (z - center) / scale;
    double eta = beta[0];
    if (basis == Basis::Polynomial) {
        double pw = 1.0;
        for (std::size_t j = 1; j < beta.size(); ++j) {
            pw *= s;
            eta += beta[j] * pw;
        }
    } else {
        std::vector<double> row(beta.size() - 1);
        spline_row(knots, s, row.data());
        for (std::size_t j = 1; j < beta.size(); ++j)
            eta += beta[j] * row[j - 1];
    }
    return std::exp(eta) / (static_cast<double>(n) * bin_width);
}

bool MixtureDensityFit::extrapolates(double z) const {
    return z < range_lo - bin_width || z > range_hi + bin_width;
}

double MixtureDensityFit::cdf(double z) const {
    const double lo = range_lo;
    const double hi = std::min(z, range_hi);
    if (hi <= lo) return 0.0;
    const int steps = 2 * std::max(64, static_cast<int>((hi - lo) / bin_width) * 4);
    const double h = (hi - lo) / steps;
    double acc = density(lo) + density(hi);
    for (int i = 1; i < steps; ++i)
        acc += density(lo + h * i) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

MixtureDensityFit fit_mixture_density(const BinnedHistogram& hist, int degree,
                                      Basis basis) {
    if (degree < 2 || degree > 10)
        throw std::invalid_argument("fit_mixture_density: degree in [2,10]");
    const int k = static_cast<int>(hist.num_bins());
    const long nonempty =
        std::count_if(hist.counts.begin(), hist.counts.end(),
                      [](long c) { return c > 0; });
    if (nonempty < degree + 3)
        throw std::invalid_argument(
            "fit_mixture_density: fewer than degree+3 nonempty bins");

    MixtureDensityFit fit;
    fit.basis = basis;
    fit.degree = degree;
    fit.n = hist.n;
    fit.bin_width = hist.width;
    fit.range_lo = hist.edges.front();
    fit.range_hi = hist.edges.back();

    // standardize midpoints
    const double mean = std::accumulate(hist.midpoints.begin(),
                                        hist.midpoints.end(), 0.0) /
                        k;
    double ss = 0.0;
    for (double x : hist.midpoints) ss += (x - mean) * (x - mean);
    fit.center = mean;
    fit.scale = std::sqrt(ss / (k - 1));

    const int p = degree + 1;
    fit.beta.assign(p, 0.0);
    if (basis == Basis::NaturalSpline) {
        const double lo = (hist.midpoints.front() - mean) / fit.scale;
        const double hi = (hist.midpoints.back() - mean) / fit.scale;
        fit.knots = spline_knots(lo, hi, degree);
    }

    const Eigen::MatrixXd design = design_matrix(fit, hist.midpoints);
    Eigen::VectorXd y(k);
    for (int i = 0; i < k; ++i) y(i) = static_cast<double>(hist.counts[i]);

    // init: flat fit at the mean count
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    beta(0) = std::log(std::max(y.mean(), 1e-8));

    double dev_prev = std::numeric_limits<double>::infinity();
    constexpr int kMaxIter = 50;
    for (int iter = 1; iter <= kMaxIter; ++iter) {
        Eigen::VectorXd eta = design * beta;
        Eigen::VectorXd mu = eta.array().min(40.0).exp();
        // working response: eta + (y - mu)/mu, weights mu
        Eigen::VectorXd wz = eta.array() + (y - mu).array() / mu.array();
        Eigen::MatrixXd wdesign = mu.asDiagonal() * design;
        Eigen::MatrixXd xtwx = design.transpose() * wdesign;
        Eigen::VectorXd xtwz = wdesign.transpose() * wz;
        beta = xtwx.ldlt().solve(xtwz);

        eta = design * beta;
        mu = eta.array().min(40.0).exp();
        const double dev = poisson_deviance(hist.counts, mu);
        fit.iterations = iter;
        const double rel = std::fabs(dev_prev - dev) /
                           (std::fabs(dev) + 1e-12);
        dev_prev = dev;
        if (rel < 1e-8) {
            for (int j = 0; j < p; ++j) fit.beta[j] = beta(j);
            fit.deviance = dev;
            fit.fitted_means.resize(k);
            for (int i = 0; i < k; ++i) fit.fitted_means[i] = mu(i);
            return fit;
        }
    }
    throw std::runtime_error(
        "fit_mixture_density: IRLS did not converge in 50 iterations "
        "(last deviance " +
        std::to_string(dev_prev) + ")");
}

double fit_gradient_norm(const MixtureDensityFit& fit,
                         const BinnedHistogram& hist) {
    const Eigen::MatrixXd design = design_matrix(fit, hist.midpoints);
    const int k = static_cast<int>(hist.num_bins());
    Eigen::VectorXd resid(k);
    for (int i = 0; i < k; ++i)
        resid(i) = static_cast<double>(hist.counts[i]) - fit.fitted_means[i];
    const Eigen::VectorXd grad = design.transpose() * resid;
    return grad.cwiseAbs().maxCoeff();
}

std::vector<double> bootstrap_log_fdr_se(const ZSample& z,
                                         const BinnedHistogram& hist,
                                         int degree,
                                         const std::vector<double>& at,
                                         double p0, double delta0,
                                         double sigma0, int B,
                                         std::uint64_t seed) {
    const std::size_t n = z.size();
    const std::size_t q = at.size();
    std::vector<double> sums(q, 0.0), sumsq(q, 0.0);
    long ok = 0;

#pragma omp parallel for reduction(+ : ok) schedule(dynamic)
    for (int b = 0; b < B; ++b) {
        auto rng = substream(seed, static_cast<std::uint64_t>(b));
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        ZSample rs;
        rs.values.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            double v = z.values[pick(rng)];
            // keep resamples inside the original bin range
            v = std::clamp(v, hist.edges.front(), hist.edges.back());
            rs.values[i] = v;
        }
        try {
            auto hb = bin(rs, static_cast<int>(hist.num_bins()),
                          std::make_pair(hist.edges.front(),
                                         hist.edges.back()));
            auto fb = fit_mixture_density(hb, degree);
            std::vector<double> vals(q);
            for (std::size_t j = 0; j < q; ++j)
                vals[j] = std::log(p0 * norm_pdf(at[j], delta0, sigma0) /
                                   fb.density(at[j]));
#pragma omp critical
            for (std::size_t j = 0; j < q; ++j) {
                sums[j] += vals[j];
                sumsq[j] += vals[j] * vals[j];
            }
            ++ok;
        } catch (const std::exception&) {
            // a failed replicate is dropped
        }
    }
    if (ok < 2) throw std::runtime_error("bootstrap_log_fdr_se: too few successful replicates");
    std::vector<double> se(q);
    for (std::size_t j = 0; j < q; ++j) {
        const double m = sums[j] / ok;
        se[j] = std::sqrt(std::max(0.0, (sumsq[j] / ok - m * m) * ok / (ok - 1)));
    }
    return se;
}

}  // namespace fdrkit
