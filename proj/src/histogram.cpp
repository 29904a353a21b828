#include "fdrkit/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fdrkit {

namespace {

BinnedHistogram build(const ZSample& z, double lo, double hi, int k,
                      int min_bins) {
    if (k < min_bins)
        throw std::invalid_argument("bin: need at least 10 bins");
    if (!(hi > lo))
        throw std::invalid_argument("bin: empty range");
    BinnedHistogram h;
    h.width = (hi - lo) / k;
    h.edges.resize(k + 1);
    for (int i = 0; i <= k; ++i)
        h.edges[i] = lo + h.width * i;
    h.midpoints.resize(k);
    for (int i = 0; i < k; ++i)
        h.midpoints[i] = 0.5 * (h.edges[i] + h.edges[i + 1]);
    h.counts.assign(k, 0);
    for (double v : z.values) {
        if (v < lo || v > hi)
            throw std::invalid_argument("bin: value outside supplied range");
        // interior edge -> right bin; top edge stays in the last bin
        int idx = static_cast<int>(std::floor((v - lo) / h.width));
        if (idx >= k) idx = k - 1;
        h.counts[idx]++;
    }
    h.n = static_cast<long>(z.size());
    return h;
}

std::pair<double, double> padded_range(const ZSample& z, int k) {
    auto [mn, mx] = std::minmax_element(z.values.begin(), z.values.end());
    double lo = *mn, hi = *mx;
    if (hi == lo) hi = lo + 1.0;  // all values equal
    const double pad = 0.5 * (hi - lo) / k;
    return {lo - pad, hi + pad};
}

}  // namespace

BinnedHistogram bin(const ZSample& z, int k,
                    std::optional<std::pair<double, double>> range) {
    z.validate();
    auto [lo, hi] = range ? *range : padded_range(z, k);
    return build(z, lo, hi, k, 10);
}

BinnedHistogram bin_width(const ZSample& z, double width,
                          std::optional<std::pair<double, double>> range) {
    z.validate();
    if (!(width > 0.0))
        throw std::invalid_argument("bin_width: width must be positive");
    double lo, hi;
    if (range) {
        lo = range->first;
        hi = range->second;
    } else {
        auto [mn, mx] = std::minmax_element(z.values.begin(), z.values.end());
        lo = *mn - 0.5 * width;
        hi = *mx + 0.5 * width;
    }
    const int k = std::max(1, static_cast<int>(std::ceil((hi - lo) / width - 1e-9)));
    return build(z, lo, lo + k * width, k, 1);
}

}  // namespace fdrkit
