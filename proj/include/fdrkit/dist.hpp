#pragma once

#include <stdexcept>

// Distribution kernels and statistic-to-z transforms.
// Everything here is a pure function of its arguments.

namespace fdrkit {

// Standard normal density.
double norm_pdf(double x);

// Normal density with mean mu, sd sigma.
double norm_pdf(double x, double mu, double sigma);

// Standard normal cdf, computed through erfc; absolute error well below
// 1e-12 across the real line, which matters for empirical-null tails.
double norm_cdf(double x);

// Inverse standard normal cdf on p in (0,1). Rational initial guess
// refined by one Newton step against norm_cdf.
// Throws std::domain_error outside (0,1).
double norm_quantile(double p);

// Regularized incomplete beta function I_x(a, b), x in [0,1].
double inc_beta(double a, double b, double x);

// cdf of Student's t with df degrees of freedom.
double t_cdf(double t, int df);

// z = Phi^{-1}(F_df(t)); maps a t statistic to the normal scale.
double t_to_z(double t, int df);

// z from a two-sided p-value; sign picks the tail (z < 0 for sign < 0).
double p_to_z(double p_two_sided, int sign);

// Two-proportion z with an offset subtracted from the difference.
// Throws std::invalid_argument on degenerate (zero-variance) input.
double binom_to_z(double p_ad, long n_ad, double p_dis, long n_dis,
                  double delta);

}  // namespace fdrkit
