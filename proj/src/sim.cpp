#include "fdrkit/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fdrkit/density.hpp"
#include "fdrkit/dist.hpp"
#include "fdrkit/fdr.hpp"
#include "fdrkit/nullfit.hpp"
#include "fdrkit/rng.hpp"
#include "fdrkit/selectci.hpp"

namespace fdrkit {

SimulatedSample simulate_prior_mixture(const PriorMixture& prior, long n,
                                       std::uint64_t seed) {
    prior.validate();
    auto rng = substream(seed, 0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    SimulatedSample out;
    out.z.values.resize(n);
    out.mu.resize(n);
    out.is_null.resize(n);
    for (long i = 0; i < n; ++i) {
        double u = unif(rng);
        std::size_t c = 0;
        for (; c + 1 < prior.components.size(); ++c) {
            if (u < prior.components[c].weight) break;
            u -= prior.components[c].weight;
        }
        const auto& comp = prior.components[c];
        const double mu = comp.mean + comp.sd * gauss(rng);
        out.mu[i] = mu;
        out.is_null[i] = c == 0;
        out.z.values[i] = mu + gauss(rng);
    }
    return out;
}

SimulatedSample simulate_two_groups(double p0, double nonnull_mean,
                                    double nonnull_sd, long n,
                                    std::uint64_t seed) {
    if (!(p0 > 0.0 && p0 <= 1.0))
        throw std::invalid_argument("simulate_two_groups: p0 in (0,1]");
    PriorMixture prior;
    prior.components.push_back({p0, 0.0, 0.0});
    if (p0 < 1.0)
        prior.components.push_back({1.0 - p0, nonnull_mean, nonnull_sd});
    return simulate_prior_mixture(prior, n, seed);
}

double implied_alpha(long n_null, long blocks, double rho_block) {
    // fraction of pairs sharing a block, times rho^2
    const double per_block = static_cast<double>(n_null) / blocks;
    const double within =
        blocks * per_block * (per_block - 1.0) / 2.0;
    const double total =
        static_cast<double>(n_null) * (n_null - 1.0) / 2.0;
    return std::sqrt(within / total * rho_block * rho_block);
}

SimulatedSample simulate_correlated(long n_null, long n_nonnull, long blocks,
                                    double rho_block, double nonnull_mean,
                                    double nonnull_sd, std::uint64_t seed) {
    if (blocks < 1 || blocks > n_null)
        throw std::invalid_argument("simulate_correlated: bad block count");
    if (!(rho_block >= 0.0 && rho_block < 1.0))
        throw std::invalid_argument("simulate_correlated: rho in [0,1)");
    auto rng = substream(seed, 0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    SimulatedSample out;
    const long n = n_null + n_nonnull;
    out.z.values.resize(n);
    out.mu.resize(n);
    out.is_null.resize(n);

    const double sr = std::sqrt(rho_block), se = std::sqrt(1.0 - rho_block);
    std::vector<double> factor(blocks);
    for (long b = 0; b < blocks; ++b) factor[b] = gauss(rng);
    for (long i = 0; i < n_null; ++i) {
        const long b = i % blocks;
        out.z.values[i] = sr * factor[b] + se * gauss(rng);
        out.mu[i] = 0.0;
        out.is_null[i] = true;
    }
    for (long i = n_null; i < n; ++i) {
        out.z.values[i] = nonnull_mean + nonnull_sd * gauss(rng);
        out.mu[i] = nonnull_mean;
        out.is_null[i] = false;
    }
    return out;
}

double sigma0_percentile(const ZSample& z, bool literal_16_86) {
    if (z.size() < 100)
        throw std::invalid_argument("sigma0_percentile: need N >= 100");
    std::vector<double> sorted = z.values;
    std::sort(sorted.begin(), sorted.end());
    const double lo_p = literal_16_86 ? 0.16 : norm_cdf(-1.0);
    const double hi_p = literal_16_86 ? 0.86 : norm_cdf(1.0);
    auto quantile = [&](double p) {
        // type-7 interpolation
        const double h = p * (sorted.size() - 1);
        const std::size_t i = static_cast<std::size_t>(h);
        if (i + 1 >= sorted.size()) return sorted.back();
        return sorted[i] + (h - i) * (sorted[i + 1] - sorted[i]);
    };
    return 0.5 * (quantile(hi_p) - quantile(lo_p));
}

double fdp(const std::vector<std::size_t>& selected,
           const std::vector<bool>& is_null) {
    if (selected.empty()) return 0.0;
    long nulls = 0;
    for (std::size_t i : selected)
        if (is_null[i]) ++nulls;
    return static_cast<double>(nulls) /
           static_cast<double>(selected.size());
}

namespace {

SimAggregate aggregate(const std::vector<double>& v) {
    SimAggregate a;
    if (v.empty()) return a;
    a.mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double ss = 0.0;
    for (double x : v) ss += (x - a.mean) * (x - a.mean);
    a.sd = v.size() > 1 ? std::sqrt(ss / (v.size() - 1)) : 0.0;
    return a;
}

// One replicate of the Table 1/2 study: model (two-groups p0=0.9,
// nonnull N(3,1)), N = 1500; density fit plus both null estimates.
struct NullStudyRecord {
    NullModel geometric;
    NullModel analytic;
    // log fdr-hat at the probe points under each null mode
    std::vector<double> log_fdr_theoretical;
    std::vector<double> log_fdr_empirical;
};

const std::vector<double> kProbeZ = {1.5, 2.0, 2.5, 3.0, 3.5, 4.0};

NullStudyRecord null_study_replicate(std::uint64_t seed, long rep) {
    const auto sample =
        simulate_two_groups(0.9, 3.0, 1.0, 1500, seed + 1000003 * rep);
    auto hist = bin(sample.z, 90);
    auto fit = fit_mixture_density(hist, 7);
    NullStudyRecord rec;
    rec.geometric = geometric_null(fit, hist);
    rec.analytic =
        analytic_null(sample.z, preliminary_interval(sample.z)).model;

    const auto theo = theoretical_null(0.9);
    for (double zq : kProbeZ) {
        rec.log_fdr_theoretical.push_back(
            std::log(local_fdr(zq, theo, fit).raw_ratio));
        rec.log_fdr_empirical.push_back(
            std::log(local_fdr(zq, rec.geometric, fit).raw_ratio));
    }
    return rec;
}

void run_null_study(SimReport& rep, long reps, std::uint64_t seed) {
    auto& s = rep.series;
    const std::vector<std::string> probes = {"1.5", "2.0", "2.5",
                                             "3.0", "3.5", "4.0"};
    long failures = 0;
#pragma omp parallel for reduction(+ : failures) schedule(dynamic)
    for (long r = 0; r < reps; ++r) {
        try {
            const auto rec = null_study_replicate(seed, r);
#pragma omp critical
            {
                s["geometric_delta0"].push_back(rec.geometric.delta0);
                s["geometric_sigma0"].push_back(rec.geometric.sigma0);
                s["geometric_p0"].push_back(rec.geometric.p0_raw);
                s["analytic_delta0"].push_back(rec.analytic.delta0);
                s["analytic_sigma0"].push_back(rec.analytic.sigma0);
                s["analytic_p0"].push_back(rec.analytic.p0_raw);
                for (std::size_t q = 0; q < probes.size(); ++q) {
                    s["log_fdr_theoretical_z" + probes[q]].push_back(
                        rec.log_fdr_theoretical[q]);
                    s["log_fdr_empirical_z" + probes[q]].push_back(
                        rec.log_fdr_empirical[q]);
                }
            }
        } catch (const std::exception&) {
            ++failures;
        }
    }
    rep.failures = failures;
}

void run_fig6(SimReport& rep, long reps, std::uint64_t seed) {
    long failures = 0;
#pragma omp parallel for reduction(+ : failures) schedule(dynamic)
    for (long r = 0; r < reps; ++r) {
        try {
            const auto sample = simulate_correlated(
                2700, 300, 10, 0.5, 2.5, 1.5, seed + 7000003 * r);
            const auto null = theoretical_null(1.0);
            const auto sel =
                bh_select(sample.z, null, 0.10, TailSide::Right);
            const double s0 = sigma0_percentile(sample.z);
            const double f = fdp(sel.selected, sample.is_null);
#pragma omp critical
            {
                rep.series["sigma0_hat"].push_back(s0);
                rep.series["fdp"].push_back(f);
                rep.series["selected"].push_back(
                    static_cast<double>(sel.selected.size()));
            }
        } catch (const std::exception&) {
            ++failures;
        }
    }
    rep.failures = failures;

    // bucket means by sigma0-hat, and the sigma0/Fdp rank correlation
    const auto& s0 = rep.series["sigma0_hat"];
    const auto& f = rep.series["fdp"];
    const std::size_t n = s0.size();
    if (n >= 20) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return s0[a] < s0[b]; });
        const std::size_t bucket = std::max<std::size_t>(1, n / 20);
        double lo_acc = 0.0, hi_acc = 0.0;
        for (std::size_t i = 0; i < bucket; ++i) {
            lo_acc += f[order[i]];
            hi_acc += f[order[n - 1 - i]];
        }
        rep.aggregates["fdp_bottom5pct_sigma0"] = {lo_acc / bucket, 0.0};
        rep.aggregates["fdp_top5pct_sigma0"] = {hi_acc / bucket, 0.0};

        // Spearman rank correlation
        auto ranks = [&](const std::vector<double>& v) {
            std::vector<std::size_t> ord(n);
            std::iota(ord.begin(), ord.end(), 0);
            std::sort(ord.begin(), ord.end(), [&](std::size_t a,
                                                  std::size_t b) {
                return v[a] < v[b];
            });
            std::vector<double> rk(n);
            for (std::size_t i = 0; i < n; ++i) rk[ord[i]] = i;
            return rk;
        };
        const auto ra = ranks(s0), rb = ranks(f);
        const double mean = (n - 1) / 2.0;
        double num = 0.0, da = 0.0, db = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            num += (ra[i] - mean) * (rb[i] - mean);
            da += (ra[i] - mean) * (ra[i] - mean);
            db += (rb[i] - mean) * (rb[i] - mean);
        }
        rep.aggregates["rank_corr_sigma0_fdp"] = {
            num / std::sqrt(da * db), 0.0};
    }
}

void run_fig8(SimReport& rep, long reps, std::uint64_t seed) {
    PriorMixture prior;
    prior.components.push_back({0.9, 0.0, 0.0});
    prior.components.push_back({0.1, -3.0, 1.0});
    long failures = 0;
#pragma omp parallel for reduction(+ : failures) schedule(dynamic)
    for (long r = 0; r < reps; ++r) {
        try {
            const auto sample =
                simulate_prior_mixture(prior, 10000, seed + 9000011 * r);
            const auto ci = fcr_intervals(
                sample.z, 0.05, TailSide::Left, FcrMode::PaperMatching,
                sample.mu);
            double fcr = 0.0;
            if (!ci.selected.empty())
                fcr = static_cast<double>(ci.noncovered) /
                      static_cast<double>(ci.selected.size());
            // Bayes (7.4) coverage among truly nonnull selections
            long covered = 0, nonnull_sel = 0;
            for (std::size_t i : ci.selected) {
                if (sample.is_null[i]) continue;
                ++nonnull_sel;
                const auto bi =
                    bayes_interval(prior, sample.z.values[i], 0.95);
                if (sample.mu[i] >= bi.lo && sample.mu[i] <= bi.hi)
                    ++covered;
            }
            const double bayes_cov =
                nonnull_sel > 0
                    ? static_cast<double>(covered) / nonnull_sel
                    : 1.0;
#pragma omp critical
            {
                rep.series["selected"].push_back(
                    static_cast<double>(ci.selected.size()));
                rep.series["half_width"].push_back(ci.half_width);
                rep.series["fcr"].push_back(fcr);
                rep.series["bayes_coverage"].push_back(bayes_cov);
            }
        } catch (const std::exception&) {
            ++failures;
        }
    }
    rep.failures = failures;
}

}  // namespace

SimReport run_experiment(const std::string& name, long reps,
                         std::uint64_t seed) {
    if (reps < 50)
        throw std::invalid_argument("run_experiment: reps must be >= 50");
    SimReport rep;
    rep.experiment = name;
    rep.replicates = reps;
    rep.seed = seed;

    if (name == "table1" || name == "table2")
        run_null_study(rep, reps, seed);
    else if (name == "fig6")
        run_fig6(rep, reps, seed);
    else if (name == "fig8")
        run_fig8(rep, reps, seed);
    else
        throw std::invalid_argument("run_experiment: unknown experiment '" +
                                    name + "'");

    if (rep.failures * 10 > reps)
        throw std::runtime_error(
            "run_experiment: more than 10% of replicates failed");
    for (const auto& [key, values] : rep.series)
        rep.aggregates[key] = aggregate(values);
    return rep;
}

}  // namespace fdrkit
