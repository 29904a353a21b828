#include "fdrkit/onegroup.hpp"

#include <cmath>
#include <stdexcept>

#include "fdrkit/dist.hpp"

namespace fdrkit {

namespace {
constexpr double kSqrt2Pi = 2.5066282746310005024;
}

void PriorMixture::validate() const {
    if (components.empty())
        throw std::invalid_argument("PriorMixture: no components");
    double total = 0.0;
    for (const auto& c : components) {
        if (!(c.weight > 0.0))
            throw std::invalid_argument("PriorMixture: nonpositive weight");
        if (c.sd < 0.0)
            throw std::invalid_argument("PriorMixture: negative sd");
        total += c.weight;
    }
    if (std::fabs(total - 1.0) > 1e-12)
        throw std::invalid_argument("PriorMixture: weights must sum to 1");
}

double convolve_prior(const PriorMixture& prior, double z) {
    double f = 0.0;
    for (const auto& c : prior.components)
        f += c.weight * norm_pdf(z, c.mean, std::sqrt(1.0 + c.sd * c.sd));
    return f;
}

PosteriorCumulants posterior_cumulants_zero(const PriorMixture& prior) {
    prior.validate();
    // Component c posterior of mu | z = 0: N(m_c/(1+s_c^2), s_c^2/(1+s_c^2)),
    // with mixing weight proportional to w_c * phi(0; m_c, sqrt(1+s_c^2)).
    const std::size_t nc = prior.components.size();
    std::vector<double> pw(nc), pm(nc), pv(nc);
    double total = 0.0;
    for (std::size_t i = 0; i < nc; ++i) {
        const auto& c = prior.components[i];
        const double s2 = c.sd * c.sd;
        pw[i] = c.weight * norm_pdf(0.0, c.mean, std::sqrt(1.0 + s2));
        pm[i] = c.mean / (1.0 + s2);
        pv[i] = s2 / (1.0 + s2);
        total += pw[i];
    }
    PosteriorCumulants out;
    double e = 0.0;
    for (std::size_t i = 0; i < nc; ++i) e += pw[i] / total * pm[i];
    double v = 0.0, s = 0.0;
    for (std::size_t i = 0; i < nc; ++i) {
        const double w = pw[i] / total;
        const double d = pm[i] - e;
        v += w * (pv[i] + d * d);
        s += w * (d * d * d + 3.0 * d * pv[i]);  // normal components: zero
                                                 // own third central moment
    }
    out.e0 = e;
    out.v0 = v;
    out.s0 = s;
    out.vbar0 = 1.0 - v;
    out.vbar0_positive = out.vbar0 > 0.0;
    return out;
}

std::vector<double> derivatives_at_zero(
    const std::function<double(double)>& f, int j_max, double h) {
    if (j_max < 0 || j_max > 4)
        throw std::invalid_argument("derivatives_at_zero: J in [0,4]");
    auto lf = [&](double z) {
        const double v = f(z);
        if (!(v > 0.0))
            throw std::domain_error(
                "derivatives_at_zero: nonpositive density near 0");
        return std::log(v);
    };
    // central differences at step h, Richardson-extrapolated once (h/2).
    auto d1 = [&](double step) {
        return (lf(step) - lf(-step)) / (2.0 * step);
    };
    auto d2 = [&](double step) {
        return (lf(step) - 2.0 * lf(0.0) + lf(-step)) / (step * step);
    };
    auto d3 = [&](double step) {
        return (lf(2.0 * step) - 2.0 * lf(step) + 2.0 * lf(-step) -
                lf(-2.0 * step)) /
               (2.0 * step * step * step);
    };
    auto d4 = [&](double step) {
        return (lf(2.0 * step) - 4.0 * lf(step) + 6.0 * lf(0.0) -
                4.0 * lf(-step) + lf(-2.0 * step)) /
               (step * step * step * step);
    };
    auto richardson = [&](const std::function<double(double)>& d) {
        // O(h^2) truncation: D(h/2) + (D(h/2) - D(h)) / 3
        const double dh = d(h), dh2 = d(0.5 * h);
        return dh2 + (dh2 - dh) / 3.0;
    };
    std::vector<double> out;
    out.push_back(lf(0.0));
    if (j_max >= 1) out.push_back(richardson(d1));
    if (j_max >= 2) out.push_back(richardson(d2));
    if (j_max >= 3) out.push_back(richardson(d3));
    if (j_max >= 4) out.push_back(richardson(d4));
    return out;
}

TaylorNull taylor_null(const PosteriorCumulants& c, double f_at_0, int j) {
    if (j < 0 || j > 2)
        throw std::invalid_argument("taylor_null: J in {0,1,2}");
    TaylorNull out;
    out.model.method = NullMethod::Taylor;
    out.model.taylor_j = j;
    if (j == 0) {
        out.model.delta0 = 0.0;
        out.model.sigma0 = 1.0;
        out.model.p0_raw = f_at_0 * kSqrt2Pi;
    } else if (j == 1) {
        out.model.delta0 = c.e0;
        out.model.sigma0 = 1.0;
        out.model.p0_raw = f_at_0 * kSqrt2Pi * std::exp(0.5 * c.e0 * c.e0);
    } else {
        if (!c.vbar0_positive) {
            out.valid = false;
            out.model.p0_raw = 0.0;
            return out;
        }
        out.model.delta0 = c.e0 / c.vbar0;
        out.model.sigma0 = 1.0 / std::sqrt(c.vbar0);
        out.model.p0_raw = f_at_0 * std::sqrt(2.0 * M_PI / c.vbar0) *
                           std::exp(0.5 * c.e0 * c.e0 / c.vbar0);
    }
    return out;
}

double taylor_fdr(const std::function<double(double)>& f,
                  const PosteriorCumulants& c, int j, double z) {
    if (j < 0 || j > 3)
        throw std::invalid_argument("taylor_fdr: J in [0,3]");
    if (j >= 2 && !c.vbar0_positive)
        throw std::runtime_error("taylor_fdr: Vbar0 <= 0");
    double expo = -0.5 * z * z;  // J = 0: theoretical-null shape
    if (j >= 1) expo += c.e0 * z;
    if (j >= 2) expo = c.e0 * z - 0.5 * c.vbar0 * z * z;
    if (j >= 3) expo += c.s0 * z * z * z / 6.0;
    return f(0.0) * std::exp(expo) / f(z);
}

namespace {

double simpson(const std::function<double(double)>& f, double a, double b) {
    return (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
}

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double left = simpson(f, a, m), right = simpson(f, m, b);
    if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, right, 0.5 * tol, depth - 1);
}

}  // namespace

double taylor_p0(const PosteriorCumulants& c, double f_at_0, int j) {
    if (j <= 2) return taylor_null(c, f_at_0, j).model.p0_raw;
    if (!c.vbar0_positive)
        throw std::runtime_error("taylor_p0: Vbar0 <= 0");
    auto sub = [&](double z) {
        return f_at_0 * std::exp(c.e0 * z - 0.5 * c.vbar0 * z * z +
                                 c.s0 * z * z * z / 6.0);
    };
    return adaptive_simpson(sub, -10.0, 10.0, simpson(sub, -10.0, 10.0),
                            1e-8, 40);
}

double posterior_prob_uninteresting(const PriorMixture& prior, double cut,
                                    double z) {
    prior.validate();
    double total = 0.0, acc = 0.0;
    for (const auto& c : prior.components) {
        const double s2 = c.sd * c.sd;
        const double w = c.weight * norm_pdf(z, c.mean, std::sqrt(1.0 + s2));
        total += w;
        const double pmean = (z * s2 + c.mean) / (1.0 + s2);
        const double psd = std::sqrt(s2 / (1.0 + s2));
        double prob;
        if (psd == 0.0)
            prob = pmean < cut ? 1.0 : 0.0;
        else
            prob = norm_cdf((cut - pmean) / psd);
        acc += w * prob;
    }
    return acc / total;
}

}  // namespace fdrkit
