#include "fdrkit/fdr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fdrkit/dist.hpp"

namespace fdrkit {

FdrValue local_fdr(double z, const NullModel& null,
                   const MixtureDensityFit& fit) {
    FdrValue v;
    v.extrapolated = fit.extrapolates(z);
    v.raw_ratio = null.p0_used() * null.null_pdf(z) / fit.density(z);
    v.fdr = std::clamp(v.raw_ratio, 0.0, 1.0);
    return v;
}

std::vector<FdrValue> local_fdr(const ZSample& z, const NullModel& null,
                                const MixtureDensityFit& fit) {
    std::vector<FdrValue> out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i)
        out[i] = local_fdr(z.values[i], null, fit);
    return out;
}

double tail_fdr_fitted(double z, const NullModel& null,
                       const MixtureDensityFit& fit, TailSide side) {
    const double p0 = null.p0_used();
    double num, den;
    if (side == TailSide::Left) {
        num = p0 * null.null_cdf(z);
        den = fit.cdf(z);
    } else if (side == TailSide::Right) {
        num = p0 * (1.0 - null.null_cdf(z));
        den = fit.cdf(fit.range_hi) - fit.cdf(z);
    } else {
        const double za = std::fabs(z);
        num = p0 * (null.null_cdf(-za) + 1.0 - null.null_cdf(za));
        den = fit.cdf(-za) + fit.cdf(fit.range_hi) - fit.cdf(za);
    }
    if (den <= 0.0)
        throw std::runtime_error("tail_fdr: zero denominator at query point");
    return std::clamp(num / den, 0.0, 1.0);
}

double tail_fdr_empirical(double z, const NullModel& null, const ZSample& zs,
                          TailSide side) {
    const double n = static_cast<double>(zs.size());
    const double p0 = null.p0_used();
    double num, den;
    auto count_le = [&](double t) {
        return static_cast<double>(
            std::count_if(zs.values.begin(), zs.values.end(),
                          [&](double v) { return v <= t; }));
    };
    auto count_ge = [&](double t) {
        return static_cast<double>(
            std::count_if(zs.values.begin(), zs.values.end(),
                          [&](double v) { return v >= t; }));
    };
    if (side == TailSide::Left) {
        num = p0 * null.null_cdf(z);
        den = count_le(z) / n;
    } else if (side == TailSide::Right) {
        num = p0 * (1.0 - null.null_cdf(z));
        den = count_ge(z) / n;
    } else {
        const double za = std::fabs(z);
        num = p0 * (null.null_cdf(-za) + 1.0 - null.null_cdf(za));
        den = (count_le(-za) + count_ge(za)) / n;
    }
    if (den <= 0.0)
        throw std::runtime_error("tail_fdr: zero denominator at query point");
    return std::clamp(num / den, 0.0, 1.0);
}

BhSelection bh_select(const ZSample& z, const NullModel& null, double q,
                      TailSide side) {
    if (!(q > 0.0 && q < 1.0))
        throw std::invalid_argument("bh_select: q in (0,1)");
    const std::size_t n = z.size();
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double f0 = null.null_cdf(z.values[i]);
        if (side == TailSide::Left)
            p[i] = f0;
        else if (side == TailSide::Right)
            p[i] = 1.0 - f0;
        else
            p[i] = 2.0 * std::min(f0, 1.0 - f0);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });

    const double p0 = null.p0_used();
    std::size_t cut = 0;  // number of rejections
    for (std::size_t i = 0; i < n; ++i) {
        const double thresh =
            static_cast<double>(i + 1) * q / (static_cast<double>(n) * p0);
        if (p[order[i]] <= thresh) cut = i + 1;
    }
    BhSelection out;
    if (cut == 0) return out;
    out.selected.assign(order.begin(), order.begin() + cut);
    std::sort(out.selected.begin(), out.selected.end());
    out.threshold_p = p[order[cut - 1]];
    // boundary z on the selection side
    double zb = z.values[order[cut - 1]];
    if (side == TailSide::TwoSided) zb = std::fabs(zb);
    out.threshold_z = zb;
    return out;
}

double lehmann_link(double fdr_tail, double gamma) {
    if (!(fdr_tail > 0.0 && fdr_tail < 1.0))
        throw std::domain_error("lehmann_link: Fdr in (0,1)");
    if (!(gamma > 0.0 && gamma < 1.0 + 1e-15))
        throw std::domain_error("lehmann_link: gamma in (0,1]");
    const double logit =
        std::log(fdr_tail / (1.0 - fdr_tail)) + std::log(1.0 / gamma);
    return 1.0 / (1.0 + std::exp(-logit));
}

PosteriorOdds posterior_odds(double fdr, double p1_over_p0) {
    if (!(fdr >= 0.0 && fdr <= 1.0))
        throw std::domain_error("posterior_odds: fdr in [0,1]");
    if (!(p1_over_p0 > 0.0))
        throw std::domain_error("posterior_odds: p1/p0 must be positive");
    PosteriorOdds out;
    if (fdr == 0.0) {
        out.infinite = true;
        out.odds = std::numeric_limits<double>::infinity();
        out.bayes_factor = std::numeric_limits<double>::infinity();
        return out;
    }
    out.odds = (1.0 - fdr) / fdr;
    out.bayes_factor = out.odds / p1_over_p0;
    return out;
}

double prior_adjust(double fdr, double p0_global, double p0_case) {
    if (!(fdr >= 0.0 && fdr <= 1.0))
        throw std::domain_error("prior_adjust: fdr in [0,1]");
    if (!(p0_global > 0.0 && p0_global < 1.0) ||
        !(p0_case > 0.0 && p0_case < 1.0))
        throw std::domain_error("prior_adjust: proportions in (0,1)");
    const double r = (p0_case / (1.0 - p0_case)) /
                     (p0_global / (1.0 - p0_global));
    return fdr * r / (1.0 - (1.0 - r) * fdr);
}

std::vector<double> nonnull_counts(const BinnedHistogram& hist,
                                   const std::vector<double>& fdr_k) {
    if (fdr_k.size() != hist.num_bins())
        throw std::invalid_argument("nonnull_counts: length mismatch");
    std::vector<double> y1(fdr_k.size());
    for (std::size_t k = 0; k < fdr_k.size(); ++k) {
        if (fdr_k[k] < 0.0 || fdr_k[k] > 1.0)
            throw std::invalid_argument("nonnull_counts: fdr outside [0,1]");
        y1[k] = (1.0 - fdr_k[k]) * static_cast<double>(hist.counts[k]);
    }
    return y1;
}

double power_diagnostic(const std::vector<double>& y1,
                        const std::vector<double>& fdr_k) {
    if (y1.size() != fdr_k.size())
        throw std::invalid_argument("power_diagnostic: length mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < y1.size(); ++k) {
        num += y1[k] * fdr_k[k];
        den += y1[k];
    }
    if (den <= 0.0)
        throw std::runtime_error("power_diagnostic: all nonnull counts zero");
    return num / den;
}

FdrResult fdr_report(const ZSample& z, const NullModel& null,
                     const MixtureDensityFit& fit, double q,
                     double fdr_threshold, TailSide side, bool use_ecdf) {
    FdrResult res;
    res.null = null;
    res.local = local_fdr(z, null, fit);
    const std::size_t n = z.size();
    res.tail_left.resize(n);
    res.tail_right.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double zi = z.values[i];
        if (use_ecdf) {
            res.tail_left[i] =
                tail_fdr_empirical(zi, null, z, TailSide::Left);
            res.tail_right[i] =
                tail_fdr_empirical(zi, null, z, TailSide::Right);
        } else {
            res.tail_left[i] = tail_fdr_fitted(zi, null, fit, TailSide::Left);
            res.tail_right[i] =
                tail_fdr_fitted(zi, null, fit, TailSide::Right);
        }
    }
    const auto bh = bh_select(z, null, q, side);
    res.selected_bh.assign(n, false);
    for (std::size_t idx : bh.selected) res.selected_bh[idx] = true;
    res.selected_fdr_threshold.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        res.selected_fdr_threshold[i] = res.local[i].fdr <= fdr_threshold;
    return res;
}

}  // namespace fdrkit
