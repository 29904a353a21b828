#pragma once

#include <functional>
#include <vector>

#include "fdrkit/nullfit.hpp"

namespace fdrkit {

// An effect-size prior g(mu) as a finite mixture of normals; sd == 0
// encodes a point mass.
struct PriorComponent {
    double weight;
    double mean;
    double sd;
};

struct PriorMixture {
    std::vector<PriorComponent> components;
    void validate() const;  // weights positive, sum to 1 within 1e-12
};

// Exact marginal density of z under mu ~ g, z|mu ~ N(mu, 1):
// sum_c w_c * phi(z; m_c, sqrt(1 + s_c^2)).
double convolve_prior(const PriorMixture& prior, double z);

// Cumulants of the posterior of mu given z = 0, from normal-normal
// conjugacy within each component.
struct PosteriorCumulants {
    double e0 = 0.0;       // posterior mean
    double v0 = 0.0;       // posterior variance
    double s0 = 0.0;       // posterior third central moment
    double vbar0 = 1.0;    // 1 - v0
    bool vbar0_positive = true;
};

PosteriorCumulants posterior_cumulants_zero(const PriorMixture& prior);

// Numerical derivatives of log f at 0 (central differences, one
// Richardson step); returns l^(0)(0)..l^(J)(0). Independent cross-check
// of the conjugacy path.
std::vector<double> derivatives_at_zero(
    const std::function<double(double)>& f, int j_max, double h = 0.1);

// Taylor-expansion null of order J = 0, 1 or 2: a normal f0 matched to
// f at zero, with closed-form p0. Flags failure when vbar0 <= 0.
struct TaylorNull {
    NullModel model;
    bool valid = true;
};
TaylorNull taylor_null(const PosteriorCumulants& c, double f_at_0, int j);

// fdr_J(z) = (f(0)/f(z)) exp(E0 z - Vbar0 z^2/2 + S0 z^3/6 ...), terms
// up to order J (J in 0..3; J = 0 and 1 keep the unit -z^2/2 term).
double taylor_fdr(const std::function<double(double)>& f,
                  const PosteriorCumulants& c, int j, double z);

// p0 = integral of the J-th order subdensity f0-tilde; closed form for
// J <= 2, adaptive Simpson over [-10, 10] for J = 3.
double taylor_p0(const PosteriorCumulants& c, double f_at_0, int j);

// Exact Pr{mu < cut | z} from the component-posterior mixture.
double posterior_prob_uninteresting(const PriorMixture& prior, double cut,
                                    double z);

}  // namespace fdrkit
