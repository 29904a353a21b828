#include "fdrkit/selectci.hpp"

#include <cmath>
#include <stdexcept>

#include "fdrkit/dist.hpp"

namespace fdrkit {

SelectionIntervals fcr_intervals(
    const ZSample& z, double q, TailSide side, FcrMode mode,
    const std::optional<std::vector<double>>& truth) {
    if (!(q > 0.0 && q < 1.0))
        throw std::invalid_argument("fcr_intervals: q in (0,1)");
    const auto null = theoretical_null(1.0);
    const auto bh = bh_select(z, null, q, side);

    SelectionIntervals out;
    out.q = q;
    out.selected = bh.selected;
    out.threshold_z = bh.threshold_z;
    const std::size_t r = bh.selected.size();
    if (r == 0) return out;

    const double n = static_cast<double>(z.size());
    const double tail = mode == FcrMode::PaperMatching
                            ? static_cast<double>(r) * q / n
                            : static_cast<double>(r) * q / (2.0 * n);
    out.half_width = norm_quantile(1.0 - tail);
    out.lo.resize(r);
    out.hi.resize(r);
    for (std::size_t i = 0; i < r; ++i) {
        const double zi = z.values[bh.selected[i]];
        out.lo[i] = zi - out.half_width;
        out.hi[i] = zi + out.half_width;
    }
    if (truth) {
        if (truth->size() != z.size())
            throw std::invalid_argument("fcr_intervals: truth length mismatch");
        long miss = 0;
        for (std::size_t i = 0; i < r; ++i) {
            const double mu = (*truth)[bh.selected[i]];
            if (mu < out.lo[i] || mu > out.hi[i]) ++miss;
        }
        out.noncovered = miss;
    }
    return out;
}

BayesInterval bayes_interval(const PriorMixture& prior, double z,
                             double level) {
    prior.validate();
    if (prior.components.size() != 2)
        throw std::invalid_argument(
            "bayes_interval: prior must have exactly two components");
    const PriorComponent* point = nullptr;
    const PriorComponent* normal = nullptr;
    for (const auto& c : prior.components) {
        if (c.sd == 0.0 && c.mean == 0.0)
            point = &c;
        else if (c.sd > 0.0)
            normal = &c;
    }
    if (!point || !normal)
        throw std::invalid_argument(
            "bayes_interval: need one point mass at 0 and one normal "
            "component");
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("bayes_interval: level in (0,1)");

    const double s2 = normal->sd * normal->sd;
    const double f_null = point->weight * norm_pdf(z);
    const double f_alt =
        normal->weight * norm_pdf(z, normal->mean, std::sqrt(1.0 + s2));

    BayesInterval out;
    out.fdr_at_z = f_null / (f_null + f_alt);
    out.nonnull_center = (z * s2 + normal->mean) / (1.0 + s2);
    const double psd = std::sqrt(s2 / (1.0 + s2));
    out.nonnull_halfwidth = norm_quantile(0.5 * (1.0 + level)) * psd;
    out.lo = out.nonnull_center - out.nonnull_halfwidth;
    out.hi = out.nonnull_center + out.nonnull_halfwidth;
    return out;
}

}  // namespace fdrkit
