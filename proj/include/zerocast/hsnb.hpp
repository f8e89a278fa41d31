#pragma once

#include <cmath>

#include "zerocast/errors.hpp"
#include "zerocast/math.hpp"
#include "zerocast/negbin.hpp"
#include "zerocast/rng.hpp"

namespace zerocast {

/**
 * @brief Hurdle-shifted negative binomial, Y = O * (1 + Z).
 *
 * O is a Bernoulli(pi) occurrence gate and Z a NegBin(r, p) size; zeros come
 * only from the gate, positive values are the shifted count.
 */
struct HsnbParams {
    double pi;
    double r;
    double p;

    NegBinParams size() const { return NegBinParams{r, p}; }
};

inline double hsnb_logpmf(const HsnbParams& params, double y) {
    detail::check_count_support(y, "hsnb_logpmf");
    if (y == 0.0) {
        if (params.pi >= 1.0) return -kInf;
        return std::log1p(-params.pi);
    }
    if (params.pi <= 0.0) return -kInf;
    return std::log(params.pi) + nb_logpmf(params.size(), y - 1.0);
}

inline double hsnb_mean(const HsnbParams& params) {
    return params.pi * (1.0 + nb_mean(params.size()));
}

inline double hsnb_var(const HsnbParams& params) {
    const double m_z = nb_mean(params.size());
    const double v_z = nb_var(params.size());
    const double second = params.pi * (1.0 + 2.0 * m_z + v_z + m_z * m_z);
    const double mean = hsnb_mean(params);
    return second - mean * mean;
}

// The gate and the unit shift are scale-invariant; only the size shifts.
inline HsnbParams hsnb_scale(const HsnbParams& params, double s) {
    const NegBinParams scaled = nb_scale(params.size(), s);
    return HsnbParams{params.pi, scaled.r, scaled.p};
}

inline double hsnb_sample(const HsnbParams& params, Rng& rng) {
    if (!rng.bernoulli(params.pi)) return 0.0;
    return 1.0 + nb_sample(params.size(), rng);
}

inline double hsnb_quantile(const HsnbParams& params, double q) {
    if (!(q > 0.0) || !(q < 1.0)) throw DomainError("hsnb_quantile: level must lie in (0,1)");
    double cum = 1.0 - params.pi;
    if (cum >= q) return 0.0;
    const NegBinParams size = params.size();
    double pmf = params.pi * std::exp(size.r * std::log(size.p));
    double y = 1.0;
    cum += pmf;
    const double one_minus_p = 1.0 - size.p;
    while (cum < q) {
        const double k = y - 1.0;
        pmf *= (k + size.r) / (k + 1.0) * one_minus_p;
        y += 1.0;
        if (std::fmod(y, 4096.0) == 0.0) pmf = params.pi * std::exp(nb_logpmf(size, y - 1.0));
        cum += pmf;
        if (y > 1e8) throw NumericsError("hsnb_quantile: accumulation exceeded 1e8 terms");
    }
    return y;
}

/**
 * @brief Negative log-likelihood and gradient in unconstrained space.
 *
 * pi = sigmoid(z_pi), r = softplus(z_r), p = sigmoid(z_p - log_s).
 */
inline double hsnb_nll_grad(double z_pi, double z_r, double z_p, double y, double log_s, double* dz) {
    detail::check_count_support(y, "hsnb_nll_grad");
    const double pi = sigmoid(z_pi);
    if (y == 0.0) {
        dz[0] = pi;
        dz[1] = 0.0;
        dz[2] = 0.0;
        return log1pexp(z_pi);
    }
    double dnb[2];
    const double nb = nb_nll_grad(z_r, z_p, y - 1.0, log_s, dnb);
    dz[0] = -(1.0 - pi);
    dz[1] = dnb[0];
    dz[2] = dnb[1];
    return log1pexp(-z_pi) + nb;
}

} // namespace zerocast
