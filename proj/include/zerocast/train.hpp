#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "zerocast/adam.hpp"
#include "zerocast/batch.hpp"
#include "zerocast/errors.hpp"
#include "zerocast/heads.hpp"
#include "zerocast/math.hpp"
#include "zerocast/nets.hpp"
#include "zerocast/rng.hpp"
#include "zerocast/series.hpp"
#include "zerocast/tape.hpp"

namespace zerocast {

/**
 * @brief Knobs of the training loop.
 */
struct TrainConfig {
    int batch_size = 32;
    int max_epochs = 200;
    int patience = 10;
    double lr = 1e-3;
    std::uint64_t seed = 1;
    double clip_norm = 10.0;
    int batches_per_epoch = 50;

    void validate() const {
        if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
        if (max_epochs < 1) throw ConfigError("max_epochs must be at least 1");
        if (patience < 1) throw ConfigError("patience must be at least 1");
        if (!(lr > 0.0)) throw ConfigError("lr must be positive");
        if (batches_per_epoch < 1) throw ConfigError("batches_per_epoch must be at least 1");
    }
};

struct EpochLog {
    int epoch = 0;
    double train_nll = 0.0;
    double val_nll = 0.0;
};

/**
 * @brief Outcome of train(): the best-validation network plus the run history.
 */
struct TrainResult {
    Network net;
    double init_val = 0.0;
    double best_val = 0.0;
    int best_epoch = 0;
    std::vector<EpochLog> log;
};

// Summed negative log-likelihood of the batch. Context windows are scaled per
// series and the heads are evaluated on the original counts through log s.
// When grad is non-null it receives the gradient of the sum with respect to
// every network parameter.
inline double nll_loss(const Network& net, const Dataset& ds, const Batch& batch,
                       std::vector<double>* grad) {
    const int c = net.spec.context;
    const int h = net.spec.horizon;
    const int P = head_param_count(net.spec.head);
    Tape tape(net.params);
    std::vector<double> x(static_cast<std::size_t>(c));
    std::vector<double> dz(static_cast<std::size_t>(h) * P);
    double total = 0.0;
    for (const auto& [i, w] : batch) {
        const double s = ds.stats(i).scale;
        const double log_s = std::log(s);
        for (int j = 0; j < c; ++j) x[j] = ds.at(i, w - c + 1 + j) / s;
        tape.reset();
        const int out = net.forward(tape, x);
        const auto& z = tape.value(out);
        for (double v : z) {
            if (!std::isfinite(v)) {
                throw TrainingDiagnosticError("non-finite loss for series '" + ds.series[i].id +
                                              "' at window " + std::to_string(w));
            }
        }
        double pair_nll = 0.0;
        for (int t = 0; t < h; ++t) {
            pair_nll += grad_nll(net.spec.head, z.data() + static_cast<std::size_t>(t) * P,
                                 ds.at(i, w + 1 + t), log_s, dz.data() + static_cast<std::size_t>(t) * P);
        }
        if (!std::isfinite(pair_nll)) {
            throw TrainingDiagnosticError("non-finite loss for series '" + ds.series[i].id +
                                          "' at window " + std::to_string(w));
        }
        total += pair_nll;
        if (grad != nullptr) {
            tape.seed_grad(out, dz);
            tape.backward();
        }
    }
    if (grad != nullptr) *grad = tape.param_grad();
    return total;
}

// Mean per-observation NLL of the window ending at T, over every series.
inline double validation_nll(const Network& net, const Dataset& ds) {
    Batch batch;
    batch.reserve(ds.series.size());
    for (std::size_t i = 0; i < ds.series.size(); ++i) {
        batch.emplace_back(i, ds.train_end - ds.horizon);
    }
    const double sum = nll_loss(net, ds, batch, nullptr);
    return sum / (static_cast<double>(ds.series.size()) * ds.horizon);
}

// Adam on pooled windows with best-checkpoint early stopping: after each
// epoch the validation NLL is scored, and the run stops once it has not
// improved for `patience` consecutive epochs.
inline TrainResult train(const ModelSpec& spec, const Dataset& ds, const TrainConfig& cfg) {
    cfg.validate();
    spec.validate();
    ds.validate();
    if (!is_global(spec.kind)) {
        throw ConfigError(std::string("train: '") + model_name(spec.kind) +
                          "' is fit per series, not trained");
    }
    if (spec.context != ds.context || spec.horizon != ds.horizon) {
        throw ConfigError("train: model dims (c=" + std::to_string(spec.context) + ", h=" +
                          std::to_string(spec.horizon) + ") do not match the dataset (c=" +
                          std::to_string(ds.context) + ", h=" + std::to_string(ds.horizon) + ")");
    }

    Network net = build_network(spec, cfg.seed);
    AdamState opt(net.params.size(), cfg.lr);
    std::vector<double> grad;

    TrainResult res;
    res.net = net;
    res.init_val = validation_nll(net, ds);
    res.best_val = kInf;
    int since_best = 0;

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        BatchStream batches =
            make_batches(ds, cfg.batch_size, derive_seed(cfg.seed, static_cast<std::uint64_t>(epoch)));
        double epoch_nll = 0.0;
        for (int b = 0; b < cfg.batches_per_epoch; ++b) {
            const Batch batch = batches.next();
            double nll = 0.0;
            try {
                nll = nll_loss(net, ds, batch, &grad);
            } catch (const TrainingDiagnosticError& err) {
                throw TrainingDiagnosticError(std::string(err.what()) + " (epoch " +
                                              std::to_string(epoch) + ", batch " +
                                              std::to_string(b + 1) + ")");
            }
            epoch_nll += nll;
            if (cfg.clip_norm > 0.0) clip_global_norm(grad, cfg.clip_norm);
            adam_step(opt, net.params.values, grad);
        }
        double val = 0.0;
        try {
            val = validation_nll(net, ds);
        } catch (const TrainingDiagnosticError& err) {
            throw TrainingDiagnosticError(std::string(err.what()) + " (validating after epoch " +
                                          std::to_string(epoch) + ")");
        }
        const double denom =
            static_cast<double>(cfg.batches_per_epoch) * cfg.batch_size * ds.horizon;
        res.log.push_back({epoch, epoch_nll / denom, val});
        if (val < res.best_val) {
            res.best_val = val;
            res.best_epoch = epoch;
            res.net = net;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            break;
        }
    }
    return res;
}

} // namespace zerocast
