#pragma once

#include <vector>

#include "fdrkit/density.hpp"
#include "fdrkit/nullfit.hpp"
#include "fdrkit/zsample.hpp"

namespace fdrkit {

enum class TailSide { Left, Right, TwoSided };

struct FdrValue {
    double fdr = 1.0;       // clamped to [0, 1]
    double raw_ratio = 1.0; // p0 f0 / f-hat before clamping
    bool extrapolated = false;
};

// fdr(z) = p0 * phi_{delta0,sigma0}(z) / f-hat(z).
FdrValue local_fdr(double z, const NullModel& null,
                   const MixtureDensityFit& fit);
std::vector<FdrValue> local_fdr(const ZSample& z, const NullModel& null,
                                const MixtureDensityFit& fit);

// Tail-area Fdr. Fitted-cdf mode integrates f-hat; the empirical mode
// uses #{z_i <= z}/N (right side mirrored). Throws when the denominator
// vanishes at the query point.
double tail_fdr_fitted(double z, const NullModel& null,
                       const MixtureDensityFit& fit, TailSide side);
double tail_fdr_empirical(double z, const NullModel& null, const ZSample& zs,
                          TailSide side);

struct BhSelection {
    std::vector<std::size_t> selected;  // indices into the sample
    double threshold_z = 0.0;           // boundary z (side-dependent)
    double threshold_p = 0.0;           // largest rejected p-value
};

// Benjamini-Hochberg step-up on p-values derived from the null model:
// left p = F0(z), right p = 1 - F0(z), two-sided p = 2 min(F0, 1 - F0).
// Rejects the largest i with p_(i) <= i q / (N p0).
BhSelection bh_select(const ZSample& z, const NullModel& null, double q,
                      TailSide side);

// logit(fdr) = logit(Fdr) + log(1/gamma), the Lehmann-alternative link.
double lehmann_link(double tail_fdr, double gamma);

struct PosteriorOdds {
    double odds = 0.0;          // (1 - fdr) / fdr
    double bayes_factor = 0.0;  // odds / (p1/p0)
    bool infinite = false;      // fdr == 0
};
PosteriorOdds posterior_odds(double fdr, double p1_over_p0 = 1.0 / 9.0);

// Per-case prior adjustment (hot prospects).
double prior_adjust(double fdr, double p0_global, double p0_case);

// y1_k = (1 - fdr_k) * y_k.
std::vector<double> nonnull_counts(const BinnedHistogram& hist,
                                   const std::vector<double>& fdr_k);

// Expected nonnull fdr: sum(y1 * fdr) / sum(y1).
double power_diagnostic(const std::vector<double>& y1,
                        const std::vector<double>& fdr_k);

// Full per-case report for the CLI.
struct FdrResult {
    std::vector<FdrValue> local;
    std::vector<double> tail_left, tail_right;
    std::vector<bool> selected_bh;
    std::vector<bool> selected_fdr_threshold;
    NullModel null;
};

FdrResult fdr_report(const ZSample& z, const NullModel& null,
                     const MixtureDensityFit& fit, double q,
                     double fdr_threshold, TailSide side,
                     bool use_ecdf = false);

}  // namespace fdrkit
