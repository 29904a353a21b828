#pragma once

#include <cstdint>
#include <vector>

#include "fdrkit/histogram.hpp"

namespace fdrkit {

enum class Basis { Polynomial, NaturalSpline };

// Exponential-family fit of the marginal density f(z) by Poisson
// regression on histogram counts (Lindsey's method). Coefficients live
// on a standardized midpoint scale s = (z - center) / scale.
struct MixtureDensityFit {
    Basis basis = Basis::Polynomial;
    int degree = 7;  // polynomial degree, or spline degrees of freedom
    std::vector<double> beta;       // intercept first
    double center = 0.0;            // standardization of the basis input
    double scale = 1.0;
    std::vector<double> knots;      // spline mode only (standardized scale)
    std::vector<double> fitted_means;  // nu_k at the bin midpoints
    double deviance = 0.0;
    int iterations = 0;
    long n = 0;
    double bin_width = 0.0;
    double range_lo = 0.0, range_hi = 0.0;

    // f(z) = nu(z) / (N * width). Positive everywhere on the fitted range.
    double density(double z) const;
    // True when z lies more than one bin outside the fitted range.
    bool extrapolates(double z) const;
    // Integral of the fitted density over (-inf, z] by Simpson's rule on
    // the binned range (the fitted cdf used by tail Fdr).
    double cdf(double z) const;
};

// Maximum-likelihood fit of log nu as a degree-`degree` polynomial (or a
// natural cubic spline with `degree` df) in the standardized midpoints.
// IRLS; converged when the relative deviance change drops below 1e-8.
// Throws on non-convergence after 50 iterations, and when fewer than
// degree + 3 bins are nonempty.
MixtureDensityFit fit_mixture_density(const BinnedHistogram& hist, int degree,
                                      Basis basis = Basis::Polynomial);

// Max-norm of the Poisson log-likelihood gradient on the standardized
// basis at the fitted coefficients (convergence diagnostic).
double fit_gradient_norm(const MixtureDensityFit& fit,
                         const BinnedHistogram& hist);

// Bootstrap-over-cases standard error of log fdr(z) at the query points.
// Each replicate resamples the N z-values, rebins with the original
// layout and refits; parallel across replicates with per-replicate
// substreams.
std::vector<double> bootstrap_log_fdr_se(const ZSample& z,
                                         const BinnedHistogram& hist,
                                         int degree,
                                         const std::vector<double>& at,
                                         double p0, double delta0,
                                         double sigma0, int B,
                                         std::uint64_t seed);

}  // namespace fdrkit
