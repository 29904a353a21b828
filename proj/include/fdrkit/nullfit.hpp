#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fdrkit/density.hpp"
#include "fdrkit/zsample.hpp"

namespace fdrkit {

enum class NullMethod { Theoretical, Geometric, Analytic, Taylor };

// The null component N(delta0, sigma0^2) with proportion p0. A raw p0
// above 1 is kept for reporting; downstream code consumes p0_used.
struct NullModel {
    double delta0 = 0.0;
    double sigma0 = 1.0;
    double p0_raw = 1.0;
    NullMethod method = NullMethod::Theoretical;
    int taylor_j = -1;  // set for Taylor-derived nulls

    double p0_used() const { return p0_raw < 1.0 ? p0_raw : 1.0; }
    bool p0_clamped() const { return p0_raw > 1.0; }

    double null_pdf(double z) const;
    double null_cdf(double z) const;
};

NullModel theoretical_null(double p0 = 1.0);

// Quadratic fit to log f-hat on the central window of the histogram,
// inverted to (delta0, sigma0, p0). Window is the central mass fraction
// by counts; bins with zero counts are excluded; weights are the counts.
// Throws when the fitted quadratic has no central peak (beta2 >= 0).
NullModel geometric_null(const MixtureDensityFit& fit,
                         const BinnedHistogram& hist, double window = 0.75);

// Quadratic inversion on a raw grid of log-density values (the oracle
// path used by tests, and the workhorse behind geometric_null).
NullModel geometric_null_from_grid(const std::vector<double>& x,
                                   const std::vector<double>& logf,
                                   const std::vector<double>& weights);

struct AnalyticNullFit {
    double a = 0.0, b = 0.0;  // zero-assumption interval
    long n0 = 0;              // count inside [a, b]
    double theta = 0.0;       // n0 / n
    double p0_interval_mass = 0.0;  // P0(delta0, sigma0)
    NullModel model;
    int iterations = 0;
};

// Truncated-normal MLE for (delta0, sigma0) over z_i in [a, b];
// theta = N0/N exactly, p0 = theta / P0. Damped Newton with backtracking.
// Default interval: the 25th..75th sample percentiles.
AnalyticNullFit analytic_null(const ZSample& z,
                              std::optional<std::pair<double, double>>
                                  interval = {});

// Data-driven zero-assumption interval: median +/- c(N) * IQR-based
// robust sd, c(N) = 4.3 * N^(-0.26 / ln 10) style shrinkage. Wider than
// the quartile default; used where a stable sigma0 matters more than
// worst-case nonnull contamination (the simulation experiments).
std::pair<double, double> preliminary_interval(const ZSample& z);

struct RmsCorrelation {
    double alpha_raw = 0.0;        // sqrt(mean rho^2) over sampled pairs
    double alpha_bias_corrected = 0.0;  // floor 1/(n-1) subtracted
    double sampling_floor = 0.0;   // sqrt(1/(n-1))
    long pairs_sampled = 0;
    long rows_skipped = 0;         // constant rows
};

// Root-mean-square correlation of row pairs of a column-standardized
// matrix, by sampling up to 50,000 random pairs.
RmsCorrelation estimate_rms_correlation(
    const std::vector<std::vector<double>>& matrix, std::uint64_t seed = 1);

// sigma0 = sqrt(1 + sqrt(2) * A); throws when the argument is
// nonpositive.
double dispersion_from_A(double a_variate);

}  // namespace fdrkit
