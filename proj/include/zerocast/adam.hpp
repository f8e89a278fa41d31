#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "zerocast/errors.hpp"

namespace zerocast {

/**
 * @brief Adam moment estimates plus hyperparameters for one parameter vector.
 */
struct AdamState {
    explicit AdamState(std::size_t n, double lr_in = 1e-3) : m(n, 0.0), v(n, 0.0), lr(lr_in) {}

    std::vector<double> m;
    std::vector<double> v;
    long long t = 0;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// One bias-corrected Adam update of theta in place.
inline void adam_step(AdamState& state, std::vector<double>& theta,
                      const std::vector<double>& grad) {
    if (theta.size() != state.m.size() || grad.size() != state.m.size()) {
        throw ShapeError("adam_step: parameter, gradient and state lengths must agree");
    }
    state.t += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < theta.size(); ++i) {
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grad[i];
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grad[i] * grad[i];
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        theta[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
    }
}

// Scales grad to the given global L2 norm when it exceeds it; returns the
// norm before clipping.
inline double clip_global_norm(std::vector<double>& grad, double max_norm) {
    double sq = 0.0;
    for (double g : grad) sq += g * g;
    const double norm = std::sqrt(sq);
    if (norm > max_norm && norm > 0.0) {
        const double scale = max_norm / norm;
        for (double& g : grad) g *= scale;
    }
    return norm;
}

} // namespace zerocast
