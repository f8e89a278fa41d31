#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "zerocast/errors.hpp"
#include "zerocast/hsnb.hpp"
#include "zerocast/negbin.hpp"
#include "zerocast/rng.hpp"
#include "zerocast/tweedie.hpp"

namespace zerocast {

enum class HeadKind { negbin, hsnb, tweedie };

constexpr int head_param_count(HeadKind kind) {
    switch (kind) {
        case HeadKind::negbin: return 2;
        case HeadKind::hsnb: return 3;
        case HeadKind::tweedie: return 3;
    }
    return 0;
}

inline std::string head_name(HeadKind kind) {
    switch (kind) {
        case HeadKind::negbin: return "negbin";
        case HeadKind::hsnb: return "hsnb";
        case HeadKind::tweedie: return "tweedie";
    }
    return "?";
}

inline HeadKind parse_head(const std::string& name) {
    if (name == "negbin") return HeadKind::negbin;
    if (name == "hsnb") return HeadKind::hsnb;
    if (name == "tweedie") return HeadKind::tweedie;
    throw ConfigError("unknown head '" + name + "' (expected negbin, hsnb or tweedie)");
}

using DistParams = std::variant<NegBinParams, HsnbParams, TweedieParams>;

namespace detail {

// sigmoid rounds to exactly 0 or 1 beyond |z| ~ 37; pin the result inside
// the open interval so every downstream density stays finite.
inline double unit_link(double z) {
    return std::clamp(sigmoid(z), 1e-12, 1.0 - 1e-12);
}

} // namespace detail

/**
 * @brief Applies the link functions to one step's unconstrained head values.
 *
 * Probabilities go through sigmoid, positive parameters through softplus,
 * and the Tweedie power through 1 + sigmoid; all links are total.
 */
inline DistParams link(HeadKind kind, const double* z) {
    switch (kind) {
        case HeadKind::negbin:
            return NegBinParams{softplus(z[0]), detail::unit_link(z[1])};
        case HeadKind::hsnb:
            return HsnbParams{detail::unit_link(z[0]), softplus(z[1]), detail::unit_link(z[2])};
        case HeadKind::tweedie:
            return TweedieParams{softplus(z[0]), softplus(z[1]), 1.0 + detail::unit_link(z[2])};
    }
    throw ConfigError("link: unknown head kind");
}

/**
 * @brief Negative log-likelihood of one observation and its gradient over z.
 *
 * log_s carries the per-series scale: integer heads shift the probability
 * logit by -log_s, the Tweedie head scores the divided observation.
 */
inline double grad_nll(HeadKind kind, const double* z, double y, double log_s, double* dz) {
    switch (kind) {
        case HeadKind::negbin:
            return nb_nll_grad(z[0], z[1], y, log_s, dz);
        case HeadKind::hsnb:
            return hsnb_nll_grad(z[0], z[1], z[2], y, log_s, dz);
        case HeadKind::tweedie:
            return tweedie_nll_grad(z[0], z[1], z[2], y, log_s, dz);
    }
    throw ConfigError("grad_nll: unknown head kind");
}

inline double log_density(const DistParams& params, double y) {
    return std::visit([y](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, NegBinParams>) return nb_logpmf(p, y);
        if constexpr (std::is_same_v<T, HsnbParams>) return hsnb_logpmf(p, y);
        if constexpr (std::is_same_v<T, TweedieParams>) return tweedie_logpdf(p, y);
    }, params);
}

inline double dist_mean(const DistParams& params) {
    return std::visit([](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, NegBinParams>) return nb_mean(p);
        if constexpr (std::is_same_v<T, HsnbParams>) return hsnb_mean(p);
        if constexpr (std::is_same_v<T, TweedieParams>) return tweedie_mean(p);
    }, params);
}

inline double dist_var(const DistParams& params) {
    return std::visit([](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, NegBinParams>) return nb_var(p);
        if constexpr (std::is_same_v<T, HsnbParams>) return hsnb_var(p);
        if constexpr (std::is_same_v<T, TweedieParams>) return tweedie_var(p);
    }, params);
}

/**
 * @brief Per-series scaling transform.
 *
 * Integer heads shift the probability logit by log s; the continuous head
 * is left untouched because its draws and quantiles are multiplied by s
 * directly at forecast time.
 */
inline DistParams scale_params(const DistParams& params, double s) {
    return std::visit([s](const auto& p) -> DistParams {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, NegBinParams>) return nb_scale(p, s);
        if constexpr (std::is_same_v<T, HsnbParams>) return hsnb_scale(p, s);
        if constexpr (std::is_same_v<T, TweedieParams>) return p;
    }, params);
}

inline double quantile(const DistParams& params, double q) {
    return std::visit([q](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, NegBinParams>) return nb_quantile(p, q);
        if constexpr (std::is_same_v<T, HsnbParams>) return hsnb_quantile(p, q);
        if constexpr (std::is_same_v<T, TweedieParams>) return tweedie_quantile(p, q);
    }, params);
}

inline double sample_one(const DistParams& params, Rng& rng) {
    return std::visit([&rng](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, NegBinParams>) return nb_sample(p, rng);
        if constexpr (std::is_same_v<T, HsnbParams>) return hsnb_sample(p, rng);
        if constexpr (std::is_same_v<T, TweedieParams>) return tweedie_sample(p, rng);
    }, params);
}

// n reproducible draws from an explicit seed.
inline std::vector<double> sample(const DistParams& params, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(sample_one(params, rng));
    return out;
}

} // namespace zerocast
