#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "zerocast/errors.hpp"

namespace zerocast {

/**
 * @brief Flat parameter vector with a registry of named, non-overlapping slices.
 *
 * Layers address their weights by name ("hidden1.W", "hidden1.b", ...); the
 * registration order fixes the storage layout and is what checkpoints persist.
 */
class ParamTensor {
public:
    struct Slice {
        std::size_t offset = 0;
        std::size_t len = 0;
    };

    std::size_t add_slice(const std::string& name, std::size_t len) {
        if (index_.count(name) > 0) {
            throw ShapeError("parameter slice '" + name + "' registered twice");
        }
        Slice s{values.size(), len};
        index_.emplace(name, slices_.size());
        slices_.emplace_back(name, s);
        values.resize(values.size() + len, 0.0);
        return s.offset;
    }

    bool has_slice(const std::string& name) const { return index_.count(name) > 0; }

    Slice slice(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw ShapeError("unknown parameter slice '" + name + "'");
        return slices_[it->second].second;
    }

    std::size_t size() const { return values.size(); }

    const std::vector<std::pair<std::string, Slice>>& slices() const { return slices_; }

    std::vector<double> values;

private:
    std::vector<std::pair<std::string, Slice>> slices_;
    std::unordered_map<std::string, std::size_t> index_;
};

/**
 * @brief Reverse-mode tape over the network primitives.
 *
 * Forward calls append one op each; backward() sweeps the recorded ops exactly
 * once in reverse order, pushing gradients to upstream nodes and accumulating
 * parameter gradients. reset() clears the recorded graph but keeps the
 * parameter-gradient accumulator, so one tape can sum gradients over a batch.
 */
class Tape {
public:
    explicit Tape(const ParamTensor& params)
        : params_(params), param_grad_(params.size(), 0.0) {}

    void reset() { nodes_.clear(); }

    void zero_param_grad() { std::fill(param_grad_.begin(), param_grad_.end(), 0.0); }

    int input(std::vector<double> x) {
        Node n;
        n.op = Op::input;
        n.value = std::move(x);
        return push(std::move(n));
    }

    int linear(int x, const std::string& layer) {
        const auto w = params_.slice(layer + ".W");
        const auto b = params_.slice(layer + ".b");
        const auto& xv = node(x).value;
        if (b.len == 0 || w.len % b.len != 0) {
            throw ShapeError("linear layer '" + layer + "' has inconsistent slice lengths");
        }
        const std::size_t in = w.len / b.len;
        if (xv.size() != in) {
            throw ShapeError("linear layer '" + layer + "' expects input of length " +
                             std::to_string(in) + ", got " + std::to_string(xv.size()));
        }
        Node n;
        n.op = Op::linear;
        n.a = x;
        n.w_off = w.offset;
        n.b_off = b.offset;
        n.in = in;
        n.value.resize(b.len);
        for (std::size_t o = 0; o < b.len; ++o) {
            double acc = params_.values[b.offset + o];
            const double* row = params_.values.data() + w.offset + o * in;
            for (std::size_t i = 0; i < in; ++i) acc += row[i] * xv[i];
            n.value[o] = acc;
        }
        return push(std::move(n));
    }

    int relu(int x) {
        Node n;
        n.op = Op::relu;
        n.a = x;
        n.value = node(x).value;
        for (auto& v : n.value) v = std::max(v, 0.0);
        return push(std::move(n));
    }

    // Moving-average split into (trend, remainder) with replicated boundaries.
    std::pair<int, int> decompose(int x, int kernel) {
        const int n = static_cast<int>(node(x).value.size());
        if (kernel < 1 || kernel % 2 == 0) {
            throw ConfigError("moving-average kernel must be a positive odd integer, got " +
                              std::to_string(kernel));
        }
        if (kernel > 2 * n - 1) {
            throw ConfigError("moving-average kernel " + std::to_string(kernel) +
                              " exceeds 2*length-1 = " + std::to_string(2 * n - 1));
        }
        Node tn;
        tn.op = Op::ma_trend;
        tn.a = x;
        tn.kernel = kernel;
        tn.value.resize(static_cast<std::size_t>(n));
        const int half = (kernel - 1) / 2;
        {
            const auto& xv = node(x).value;
            for (int t = 0; t < n; ++t) {
                double acc = 0.0;
                for (int j = t - half; j <= t + half; ++j) acc += xv[std::clamp(j, 0, n - 1)];
                tn.value[t] = acc / kernel;
            }
        }
        // push can reallocate node storage, so re-fetch values afterwards
        const int trend = push(std::move(tn));
        Node rn;
        rn.op = Op::sub;
        rn.a = x;
        rn.b = trend;
        rn.value.resize(static_cast<std::size_t>(n));
        for (int t = 0; t < n; ++t) rn.value[t] = node(x).value[t] - node(trend).value[t];
        return {trend, push(std::move(rn))};
    }

    int add(int a, int b) {
        const auto& av = node(a).value;
        const auto& bv = node(b).value;
        if (av.size() != bv.size()) {
            throw ShapeError("add expects equal lengths, got " + std::to_string(av.size()) +
                             " and " + std::to_string(bv.size()));
        }
        Node n;
        n.op = Op::add;
        n.a = a;
        n.b = b;
        n.value.resize(av.size());
        for (std::size_t i = 0; i < av.size(); ++i) n.value[i] = av[i] + bv[i];
        return push(std::move(n));
    }

    const std::vector<double>& value(int id) const { return node(id).value; }

    const std::vector<double>& grad(int id) const { return node(id).grad; }

    void seed_grad(int id, const std::vector<double>& g) {
        Node& n = node(id);
        if (g.size() != n.value.size()) {
            throw ShapeError("seed_grad length " + std::to_string(g.size()) +
                             " does not match node length " + std::to_string(n.value.size()));
        }
        for (std::size_t i = 0; i < g.size(); ++i) n.grad[i] += g[i];
    }

    void backward() {
        for (int id = static_cast<int>(nodes_.size()) - 1; id >= 0; --id) {
            Node& n = nodes_[id];
            switch (n.op) {
            case Op::input:
                break;
            case Op::linear: {
                auto& gx = nodes_[n.a].grad;
                const auto& xv = nodes_[n.a].value;
                for (std::size_t o = 0; o < n.value.size(); ++o) {
                    const double g = n.grad[o];
                    if (g == 0.0) continue;
                    const double* row = params_.values.data() + n.w_off + o * n.in;
                    double* grow = param_grad_.data() + n.w_off + o * n.in;
                    for (std::size_t i = 0; i < n.in; ++i) {
                        gx[i] += g * row[i];
                        grow[i] += g * xv[i];
                    }
                    param_grad_[n.b_off + o] += g;
                }
                break;
            }
            case Op::relu: {
                auto& gx = nodes_[n.a].grad;
                const auto& xv = nodes_[n.a].value;
                for (std::size_t i = 0; i < n.value.size(); ++i) {
                    if (xv[i] > 0.0) gx[i] += n.grad[i];
                }
                break;
            }
            case Op::ma_trend: {
                auto& gx = nodes_[n.a].grad;
                const int len = static_cast<int>(n.value.size());
                const int half = (n.kernel - 1) / 2;
                for (int t = 0; t < len; ++t) {
                    const double g = n.grad[t] / n.kernel;
                    if (g == 0.0) continue;
                    for (int j = t - half; j <= t + half; ++j) gx[std::clamp(j, 0, len - 1)] += g;
                }
                break;
            }
            case Op::sub: {
                auto& ga = nodes_[n.a].grad;
                auto& gb = nodes_[n.b].grad;
                for (std::size_t i = 0; i < n.value.size(); ++i) {
                    ga[i] += n.grad[i];
                    gb[i] -= n.grad[i];
                }
                break;
            }
            case Op::add: {
                auto& ga = nodes_[n.a].grad;
                auto& gb = nodes_[n.b].grad;
                for (std::size_t i = 0; i < n.value.size(); ++i) {
                    ga[i] += n.grad[i];
                    gb[i] += n.grad[i];
                }
                break;
            }
            }
        }
    }

    const std::vector<double>& param_grad() const { return param_grad_; }

private:
    enum class Op { input, linear, relu, ma_trend, sub, add };

    struct Node {
        Op op = Op::input;
        int a = -1;
        int b = -1;
        std::size_t w_off = 0;
        std::size_t b_off = 0;
        std::size_t in = 0;
        int kernel = 0;
        std::vector<double> value;
        std::vector<double> grad;
    };

    int push(Node n) {
        n.grad.assign(n.value.size(), 0.0);
        nodes_.push_back(std::move(n));
        return static_cast<int>(nodes_.size()) - 1;
    }

    Node& node(int id) {
        if (id < 0 || id >= static_cast<int>(nodes_.size())) {
            throw ShapeError("tape node id " + std::to_string(id) + " out of range");
        }
        return nodes_[static_cast<std::size_t>(id)];
    }

    const Node& node(int id) const { return const_cast<Tape*>(this)->node(id); }

    const ParamTensor& params_;
    std::vector<Node> nodes_;
    std::vector<double> param_grad_;
};

} // namespace zerocast
