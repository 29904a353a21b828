// Null-component estimation: theoretical, geometric (quadratic
// inversion of the log density), analytic (truncated-normal MLE), and
// the correlation-induced dispersion helpers.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fdrkit/dist.hpp"
#include "fdrkit/histogram.hpp"
#include "fdrkit/nullfit.hpp"

using namespace fdrkit;

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;

// exact quadratic log-density of p0 * phi((z-d)/s)/s on a grid
void quadratic_grid(double d0, double s0, double p0, std::vector<double>& x,
                    std::vector<double>& logf, std::vector<double>& w) {
    x.clear(); logf.clear(); w.clear();
    for (double z = -1.5; z <= 1.7; z += 0.1) {
        x.push_back(z);
        logf.push_back(std::log(p0 * norm_pdf(z, d0, s0)));
        w.push_back(1.0);
    }
}
}  // namespace

TEST_CASE("theoretical null") {
    auto m = theoretical_null();
    CHECK(m.delta0 == 0.0);
    CHECK(m.sigma0 == 1.0);
    CHECK(m.p0_used() == 1.0);
    auto p = theoretical_null(0.93);
    CHECK(p.p0_used() == doctest::Approx(0.93));
    CHECK(p.null_pdf(0.0) == doctest::Approx(norm_pdf(0.0)));
    CHECK(p.null_cdf(-3.0) == doctest::Approx(norm_cdf(-3.0)));
}

TEST_CASE("geometric inversion: exact scaled normal recovers (0, 1, 0.93)") {
    std::vector<double> x, logf, w;
    quadratic_grid(0.0, 1.0, 0.93, x, logf, w);
    auto m = geometric_null_from_grid(x, logf, w);
    CHECK(m.delta0 == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(m.sigma0 == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(m.p0_raw == doctest::Approx(0.93).epsilon(1e-10));
}

TEST_CASE("geometric inversion round-trip to 1e-9") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> us(0.5, 2.0), ud(-0.5, 0.5),
        up(0.5, 1.2);
    for (int trial = 0; trial < 100; ++trial) {
        const double d0 = ud(gen), s0 = us(gen), p0 = up(gen);
        std::vector<double> x, logf, w;
        quadratic_grid(d0, s0, p0, x, logf, w);
        auto m = geometric_null_from_grid(x, logf, w);
        CHECK(std::fabs(m.delta0 - d0) < 1e-9);
        CHECK(std::fabs(m.sigma0 - s0) < 1e-9);
        CHECK(std::fabs(m.p0_raw - p0) < 1e-9);
    }
}

TEST_CASE("geometric inversion of the quadratic (-0.7169, -0.1887, -0.8818)") {
    // the fitted central quadratic reported for a strongly shifted
    // empirical null; inverting it gives (-0.107, 0.753, 0.931)
    const double b0 = -0.7169, b1 = -0.1887, b2 = -0.8818;
    std::vector<double> x, logf, w;
    for (double z = -1.0; z <= 1.0; z += 0.05) {
        x.push_back(z);
        logf.push_back(b0 + b1 * z + b2 * z * z);
        w.push_back(1.0);
    }
    auto m = geometric_null_from_grid(x, logf, w);
    CHECK(m.delta0 == doctest::Approx(-0.107).epsilon(0.01));
    CHECK(m.sigma0 == doctest::Approx(0.753).epsilon(0.005));
    CHECK(m.p0_raw == doctest::Approx(0.931).epsilon(0.005));
}

TEST_CASE("over-dispersed mixture: central quadratic sees sigma0 near 1.5") {
    // exact density 0.95*phi(z; 0, 1.5) + 0.05*phi(z; 3, 1), grid on the
    // central quartile range of the mixture, weighted by the density
    auto f = [](double z) {
        return 0.95 * norm_pdf(z, 0.0, 1.5) + 0.05 * norm_pdf(z, 3.0, 1.0);
    };
    std::vector<double> x, logf, w;
    const double lo = -0.9505, hi = 1.1972;  // mixture 25th/75th percentiles
    for (int i = 0; i <= 40; ++i) {
        const double z = lo + (hi - lo) * i / 40.0;
        x.push_back(z);
        logf.push_back(std::log(f(z)));
        w.push_back(f(z));
    }
    auto m = geometric_null_from_grid(x, logf, w);
    CHECK(m.sigma0 == doctest::Approx(1.5).epsilon(0.03));
}

TEST_CASE("convex log density raises 'no central peak'") {
    std::vector<double> x, logf, w;
    for (double z = -1.0; z <= 1.0; z += 0.1) {
        x.push_back(z);
        logf.push_back(0.5 * z * z);  // convex
        w.push_back(1.0);
    }
    CHECK_THROWS_WITH_AS(geometric_null_from_grid(x, logf, w),
                         doctest::Contains("no central peak"),
                         std::runtime_error);
}

TEST_CASE("geometric_null on a fitted null-only sample is near (0,1,1)") {
    std::mt19937_64 gen(31);
    std::normal_distribution<double> nd(0.0, 1.0);
    ZSample z;
    for (int i = 0; i < 20000; ++i) z.values.push_back(nd(gen));
    auto h = bin(z, 90);
    auto fit = fit_mixture_density(h, 7);
    auto m = geometric_null(fit, h);
    CHECK(m.delta0 == doctest::Approx(0.0).epsilon(0.05));
    CHECK(std::fabs(m.sigma0 - 1.0) < 0.05);
    CHECK(std::fabs(m.p0_used() - 1.0) < 0.05);
    CHECK(m.method == NullMethod::Geometric);
    CHECK_THROWS(geometric_null(fit, h, 0.1));   // window too small
    CHECK_THROWS(geometric_null(fit, h, 0.95));  // window too large
}

TEST_CASE("analytic MLE on exact standard-normal quantiles") {
    ZSample z;
    const int n = 10000;
    for (int i = 1; i <= n; ++i)
        z.values.push_back(norm_quantile((i - 0.5) / n));
    auto fit = analytic_null(z);  // default [q25, q75]
    CHECK(std::fabs(fit.model.delta0) < 0.02);
    CHECK(std::fabs(fit.model.sigma0 - 1.0) < 0.02);
    CHECK(std::fabs(fit.model.p0_raw - 1.0) < 0.03);
    CHECK(fit.n0 > 4900);
    CHECK(fit.model.method == NullMethod::Analytic);
}

TEST_CASE("analytic MLE consistency: error shrinks with N") {
    double prev_err = 1e9;
    for (long n : {1000L, 10000L, 100000L}) {
        ZSample z;
        for (long i = 1; i <= n; ++i)
            z.values.push_back(norm_quantile((i - 0.5) / n));
        auto fit = analytic_null(z);
        const double err = std::fabs(fit.model.sigma0 - 1.0) +
                           std::fabs(fit.model.delta0);
        CHECK(err < prev_err + 1e-12);
        prev_err = err;
    }
    CHECK(prev_err < 2e-3);
}

TEST_CASE("analytic MLE rejects bad intervals") {
    ZSample z;
    for (int i = 1; i <= 1000; ++i)
        z.values.push_back(norm_quantile((i - 0.5) / 1000.0));
    CHECK_THROWS(analytic_null(z, std::make_pair(50.0, 60.0)));  // N0 = 0
    CHECK_THROWS(analytic_null(z, std::make_pair(3.05, 3.5)));   // N0 < 25
    ZSample same;
    same.values.assign(100, 0.0);
    for (int i = 0; i < 100; ++i) same.values.push_back(5.0 + i * 0.01);
    CHECK_THROWS(analytic_null(same, std::make_pair(-1.0, 1.0)));  // all equal
}

TEST_CASE("preliminary interval straddles the quartiles") {
    ZSample z;
    for (int i = 1; i <= 1500; ++i)
        z.values.push_back(norm_quantile((i - 0.5) / 1500.0));
    auto [a, b] = preliminary_interval(z);
    CHECK(a < -0.6745);
    CHECK(b > 0.6745);
    CHECK(a == doctest::Approx(-b).epsilon(0.02));  // symmetric sample
    // wide interval keeps the MLE well-identified on a clean sample
    auto fit = analytic_null(z, std::make_pair(a, b));
    CHECK(std::fabs(fit.model.sigma0 - 1.0) < 0.02);
}

TEST_CASE("p0 estimates biased upward under the study model") {
    // 0.9 N(0,1) + 0.1 (mu ~ N(3,1)): nonnull contamination of the
    // center pushes p0-hat above the true 0.9
    std::mt19937_64 gen(40);
    std::normal_distribution<double> n0(0.0, 1.0), mu(3.0, 1.0);
    std::bernoulli_distribution pick(0.1);
    double mean_p0 = 0.0;
    const int reps = 30;
    for (int r = 0; r < reps; ++r) {
        ZSample z;
        for (int i = 0; i < 1500; ++i) {
            const double m = pick(gen) ? mu(gen) : 0.0;
            z.values.push_back(m + n0(gen));
        }
        mean_p0 += analytic_null(z, preliminary_interval(z)).model.p0_used();
    }
    CHECK(mean_p0 / reps > 0.9);
}

TEST_CASE("p0_raw above 1 is reported and clamped") {
    NullModel m;
    m.p0_raw = 1.20;  // the "impossible value" a theoretical-null fit can give
    CHECK(m.p0_clamped());
    CHECK(m.p0_used() == 1.0);
}

TEST_CASE("null-count ratio under dispersion 1.10 exceeds 2") {
    const double ratio = norm_cdf(-3.0 / 1.10) / norm_cdf(-3.0);
    CHECK(ratio == doctest::Approx(2.37).epsilon(0.01));
    CHECK(ratio > 2.0);
}

TEST_CASE("dispersion_from_A") {
    CHECK(dispersion_from_A(0.0) == doctest::Approx(1.0));
    CHECK(dispersion_from_A(0.153) == doctest::Approx(1.10).epsilon(0.005));
    CHECK(dispersion_from_A(-0.3094) == doctest::Approx(0.75).epsilon(0.005));
    CHECK_THROWS(dispersion_from_A(-0.8));  // 1 + sqrt(2) A <= 0
}

TEST_CASE("rms correlation: independent rows sit at the sampling floor") {
    std::mt19937_64 gen(8);
    std::normal_distribution<double> nd(0.0, 1.0);
    const int rows = 400, cols = 15;
    std::vector<std::vector<double>> m(rows, std::vector<double>(cols));
    for (auto& r : m)
        for (auto& v : r) v = nd(gen);
    auto est = estimate_rms_correlation(m, 99);
    CHECK(est.sampling_floor == doctest::Approx(std::sqrt(1.0 / 14.0)).epsilon(1e-12));
    CHECK(est.alpha_raw == doctest::Approx(est.sampling_floor).epsilon(0.15));
    CHECK(est.alpha_bias_corrected < 0.12);
}

TEST_CASE("rms correlation: block structure shows through") {
    // 10 equal blocks, within-block correlation 0.5 -> alpha^2 adds
    // 0.1 * 0.25 on top of the sampling floor
    std::mt19937_64 gen(12);
    std::normal_distribution<double> nd(0.0, 1.0);
    const int rows = 1000, cols = 40, blocks = 10;
    std::vector<std::vector<double>> m(rows, std::vector<double>(cols));
    for (int b = 0; b < blocks; ++b) {
        std::vector<double> shared(cols);
        for (int bi = 0; bi < rows / blocks; ++bi) {
            const int i = b * (rows / blocks) + bi;
            if (bi == 0)
                for (auto& s : shared) s = nd(gen);
            for (int j = 0; j < cols; ++j)
                m[i][j] = std::sqrt(0.5) * shared[j] +
                          std::sqrt(0.5) * nd(gen);
        }
    }
    auto est = estimate_rms_correlation(m, 7);
    CHECK(est.alpha_bias_corrected == doctest::Approx(0.158).epsilon(0.25));
}

TEST_CASE("rms correlation: two identical rows give alpha = 1") {
    std::vector<std::vector<double>> m = {{1.0, 2.0, 3.0, 4.0},
                                          {1.0, 2.0, 3.0, 4.0}};
    auto est = estimate_rms_correlation(m, 1);
    CHECK(est.alpha_raw == doctest::Approx(1.0).epsilon(1e-9));
}
