#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "zerocast/errors.hpp"
#include "zerocast/heads.hpp"
#include "zerocast/math.hpp"
#include "zerocast/rng.hpp"
#include "zerocast/tape.hpp"

namespace zerocast {

enum class ModelKind { isq, iets, fnn, dlinear };

inline const char* model_name(ModelKind kind) {
    switch (kind) {
    case ModelKind::isq: return "isq";
    case ModelKind::iets: return "iets";
    case ModelKind::fnn: return "fnn";
    case ModelKind::dlinear: return "dlinear";
    }
    throw ConfigError("unknown model kind");
}

inline ModelKind parse_model(const std::string& name) {
    if (name == "isq") return ModelKind::isq;
    if (name == "iets") return ModelKind::iets;
    if (name == "fnn") return ModelKind::fnn;
    if (name == "dlinear") return ModelKind::dlinear;
    throw ConfigError("unknown model '" + name + "': expected isq, iets, fnn or dlinear");
}

inline bool is_global(ModelKind kind) {
    return kind == ModelKind::fnn || kind == ModelKind::dlinear;
}

inline constexpr int kFnnLayers = 5;
inline constexpr int kFnnWidth = 32;

/**
 * @brief Forecaster selection plus its dimensions and architecture constants.
 */
struct ModelSpec {
    ModelKind kind = ModelKind::dlinear;
    HeadKind head = HeadKind::negbin;
    int context = 1;
    int horizon = 1;
    int kernel = 25;

    int output_dim() const { return horizon * head_param_count(head); }

    void validate() const {
        if (context < 1) throw ConfigError("model context must be at least 1");
        if (horizon < 1) throw ConfigError("model horizon must be at least 1");
        if (kind == ModelKind::dlinear) {
            if (kernel < 1 || kernel % 2 == 0) {
                throw ConfigError("dlinear kernel must be a positive odd integer, got " +
                                  std::to_string(kernel));
            }
            if (kernel > 2 * context - 1) {
                throw ConfigError("dlinear kernel " + std::to_string(kernel) +
                                  " exceeds 2*context-1 = " + std::to_string(2 * context - 1));
            }
        }
    }
};

namespace detail {

// Index of the unconstrained parameter that carries the predictive mean at
// initialization (z_r for the count heads, z_mu for tweedie).
inline int head_mean_index(HeadKind head) {
    switch (head) {
    case HeadKind::negbin: return 0;
    case HeadKind::hsnb: return 1;
    case HeadKind::tweedie: return 0;
    }
    throw ConfigError("unknown head kind");
}

// Layer plan as (name, fan_in, fan_out) in registration order.
inline std::vector<std::pair<std::string, std::pair<int, int>>> layer_plan(const ModelSpec& spec) {
    std::vector<std::pair<std::string, std::pair<int, int>>> plan;
    const int out = spec.output_dim();
    if (spec.kind == ModelKind::fnn) {
        int in = spec.context;
        for (int l = 1; l <= kFnnLayers; ++l) {
            plan.push_back({"hidden" + std::to_string(l), {in, kFnnWidth}});
            in = kFnnWidth;
        }
        plan.push_back({"out", {in, out}});
    } else {
        plan.push_back({"trend", {spec.context, out}});
        plan.push_back({"remainder", {spec.context, out}});
    }
    return plan;
}

} // namespace detail

/**
 * @brief A global model: architecture spec plus its flat parameters.
 *
 * forward() records the whole graph on the tape and returns the node holding
 * the h * P unconstrained head parameters, laid out step-major.
 */
struct Network {
    ModelSpec spec;
    ParamTensor params;

    int forward(Tape& tape, const std::vector<double>& context) const {
        if (static_cast<int>(context.size()) != spec.context) {
            throw ShapeError("forward expects a context of length " +
                             std::to_string(spec.context) + ", got " +
                             std::to_string(context.size()));
        }
        const int x = tape.input(context);
        if (spec.kind == ModelKind::fnn) {
            int h = x;
            for (int l = 1; l <= kFnnLayers; ++l) {
                h = tape.relu(tape.linear(h, "hidden" + std::to_string(l)));
            }
            return tape.linear(h, "out");
        }
        auto [trend, remainder] = tape.decompose(x, spec.kernel);
        return tape.add(tape.linear(trend, "trend"), tape.linear(remainder, "remainder"));
    }
};

// Fresh network with uniform +-1/sqrt(fan_in) weights, zero biases, and the
// final-layer mean coordinates lifted so every step starts at predictive
// mean 1 on scaled data.
inline Network build_network(const ModelSpec& spec, std::uint64_t seed) {
    spec.validate();
    if (!is_global(spec.kind)) {
        throw ConfigError(std::string("build_network: '") + model_name(spec.kind) +
                          "' is a local model without a trainable network");
    }
    Network net;
    net.spec = spec;
    const auto plan = detail::layer_plan(spec);
    for (const auto& [name, dims] : plan) {
        net.params.add_slice(name + ".W",
                             static_cast<std::size_t>(dims.first) * dims.second);
        net.params.add_slice(name + ".b", static_cast<std::size_t>(dims.second));
    }
    Rng rng(derive_seed(seed, 0));
    for (const auto& [name, dims] : plan) {
        const auto w = net.params.slice(name + ".W");
        const double bound = 1.0 / std::sqrt(static_cast<double>(dims.first));
        for (std::size_t i = 0; i < w.len; ++i) {
            net.params.values[w.offset + i] = rng.uniform(-bound, bound);
        }
    }
    const std::string head_layer = spec.kind == ModelKind::fnn ? "out" : "trend";
    const auto b = net.params.slice(head_layer + ".b");
    const int P = head_param_count(spec.head);
    const int mean_idx = detail::head_mean_index(spec.head);
    for (int t = 0; t < spec.horizon; ++t) {
        net.params.values[b.offset + static_cast<std::size_t>(t) * P + mean_idx] =
            softplus_inv(1.0);
    }
    return net;
}

} // namespace zerocast
