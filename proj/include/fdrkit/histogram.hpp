#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "fdrkit/zsample.hpp"

namespace fdrkit {

// Equal-width binning of a z-sample; input to the Poisson density fit.
struct BinnedHistogram {
    std::vector<double> edges;      // K+1 increasing, uniformly spaced
    std::vector<double> midpoints;  // K
    std::vector<long> counts;       // K, sums to n
    double width = 0.0;
    long n = 0;

    std::size_t num_bins() const { return counts.size(); }
};

// Bins into k equal bins over [lo, hi]; default range pads the data by
// half a bin on each side. Values on an interior edge go right.
// k < 10 is rejected (a degree-7 fit would be unidentifiable).
BinnedHistogram bin(const ZSample& z, int k,
                    std::optional<std::pair<double, double>> range = {});

// Same, driven by a bin width instead of a count.
BinnedHistogram bin_width(const ZSample& z, double width,
                          std::optional<std::pair<double, double>> range = {});

}  // namespace fdrkit
