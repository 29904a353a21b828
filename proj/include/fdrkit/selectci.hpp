#pragma once

#include <optional>
#include <vector>

#include "fdrkit/fdr.hpp"
#include "fdrkit/onegroup.hpp"

namespace fdrkit {

enum class FcrMode {
    PaperMatching,       // half-width Phi^{-1}(1 - R q / N)
    BenjaminiYekutieli,  // half-width Phi^{-1}(1 - R q / (2N))
};

struct SelectionIntervals {
    std::vector<std::size_t> selected;  // indices into the sample
    double threshold_z = 0.0;
    double half_width = 0.0;
    std::vector<double> lo, hi;  // per selected case, z_i +/- half_width
    double q = 0.0;
    long noncovered = -1;  // -1 when truth not supplied
};

// BH selection with the theoretical null and p0 = 1, then intervals
// z_i +/- w. When the true effects are supplied, counts how many
// intervals miss their mu_i.
SelectionIntervals fcr_intervals(
    const ZSample& z, double q, TailSide side,
    FcrMode mode = FcrMode::PaperMatching,
    const std::optional<std::vector<double>>& truth = {});

struct BayesInterval {
    double fdr_at_z = 0.0;       // posterior null probability
    double nonnull_center = 0.0;
    double nonnull_halfwidth = 0.0;
    double lo = 0.0, hi = 0.0;
};

// Two-groups Bayes interval for a prior of exactly one point mass at 0
// plus one normal component: fdr(z) from the exact mixture, and the
// nonnull conditional posterior by conjugacy.
BayesInterval bayes_interval(const PriorMixture& prior, double z,
                             double level = 0.95);

}  // namespace fdrkit
