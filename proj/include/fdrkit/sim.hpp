#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fdrkit/onegroup.hpp"
#include "fdrkit/zsample.hpp"

namespace fdrkit {

// One simulated sample with the truth retained for scoring.
struct SimulatedSample {
    ZSample z;
    std::vector<double> mu;      // true effect per case
    std::vector<bool> is_null;   // mu drawn from the null component
};

// Independent draws from a point-mass + normal-mixture prior; the first
// component is treated as the null component for truth labels.
SimulatedSample simulate_prior_mixture(const PriorMixture& prior, long n,
                                       std::uint64_t seed);

// The two-groups study model: mu = 0 w.p. p0, else mu ~ N(mean, sd).
SimulatedSample simulate_two_groups(double p0, double nonnull_mean,
                                    double nonnull_sd, long n,
                                    std::uint64_t seed);

// Null z-values equicorrelated within blocks through a shared factor
// (exact N(0,1) marginals); nonnull independent N(nonnull_mean,
// nonnull_sd^2). Throws when blocks is infeasible.
SimulatedSample simulate_correlated(long n_null, long n_nonnull, long blocks,
                                    double rho_block, double nonnull_mean,
                                    double nonnull_sd, std::uint64_t seed);

// Implied root-mean-square correlation of the block construction.
double implied_alpha(long n_null, long blocks, double rho_block);

// Half the distance between the +/- 1 sigma sample percentiles
// (15.87 / 84.13); literal = true uses the 16th and 86th instead.
double sigma0_percentile(const ZSample& z, bool literal_16_86 = false);

// False discovery proportion of a selection against truth labels.
double fdp(const std::vector<std::size_t>& selected,
           const std::vector<bool>& is_null);

struct SimAggregate {
    double mean = 0.0;
    double sd = 0.0;
};

// Replicate-level records plus aggregates for one experiment.
struct SimReport {
    std::string experiment;
    long replicates = 0;
    std::uint64_t seed = 0;
    long failures = 0;
    // named per-replicate series and their aggregates
    std::map<std::string, std::vector<double>> series;
    std::map<std::string, SimAggregate> aggregates;
};

// Desk-scale reproductions of the paper's numerical studies:
//   table2 - null-estimate means/sds, geometric and analytic methods
//   table1 - sd of log fdr-hat at z = 1.5..4.0, both null modes
//   fig6   - correlated-model BH runs: sigma0-hat vs Fdp
//   fig8   - FCR selection: counts, realized FCR, Bayes coverage
// Replicates run in parallel, one substream each; aggregation is
// order-free, so results do not depend on thread count.
SimReport run_experiment(const std::string& name, long reps,
                         std::uint64_t seed);

}  // namespace fdrkit
