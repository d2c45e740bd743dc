// Feedforward Q-value approximator: exact backpropagation, the double-DQN
// bootstrap target, adaptive-moment gradient steps, hard target-network
// synchronization, and a binary checkpoint format.
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "uavpe/replay.hpp"

namespace uavpe {

/// Fully connected net with rectifier hidden layers and identity output.
/// weights[l] is row-major (sizes[l+1] x sizes[l]).
struct QNetwork {
    std::vector<int> sizes;
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;

    int input_dim() const { return sizes.front(); }
    int output_dim() const { return sizes.back(); }
    std::size_t layer_count() const { return weights.size(); }
};

inline QNetwork make_network(const std::vector<int>& sizes) {
    if (sizes.size() < 2) throw std::invalid_argument("qnet: need at least input and output layers");
    for (int s : sizes)
        if (s < 1) throw std::invalid_argument("qnet: layer sizes must be positive");
    QNetwork net;
    net.sizes = sizes;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        net.weights.emplace_back(static_cast<std::size_t>(sizes[l + 1]) * sizes[l], 0.0);
        net.biases.emplace_back(sizes[l + 1], 0.0);
    }
    return net;
}

/// Uniform fan-in initialization: U(-1/sqrt(n_in), +1/sqrt(n_in)).
inline void init_uniform_fanin(QNetwork& net, std::mt19937_64& rng) {
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(net.sizes[l]));
        std::uniform_real_distribution<double> u(-bound, bound);
        for (double& w : net.weights[l]) w = u(rng);
        for (double& b : net.biases[l]) b = u(rng);
    }
}

namespace detail {

inline void affine(const std::vector<double>& w, const std::vector<double>& b,
                   const std::vector<double>& in, std::vector<double>& out) {
    const std::size_t n_out = b.size();
    const std::size_t n_in = in.size();
    out.resize(n_out);
    for (std::size_t o = 0; o < n_out; ++o) {
        double acc = b[o];
        const double* row = w.data() + o * n_in;
        for (std::size_t i = 0; i < n_in; ++i) acc += row[i] * in[i];
        out[o] = acc;
    }
}

}  // namespace detail

/// Layer activations kept for backpropagation. acts[0] is the input, acts[L]
/// the output q-values; pre[l] holds layer l's pre-activation.
struct ForwardCache {
    std::vector<std::vector<double>> acts;
    std::vector<std::vector<double>> pre;
};

inline std::vector<double> forward_cached(const QNetwork& net, std::span<const double> x,
                                          ForwardCache& cache) {
    if (static_cast<int>(x.size()) != net.input_dim())
        throw std::invalid_argument("qnet: input length does not match the input layer");
    const std::size_t layers = net.layer_count();
    cache.acts.assign(layers + 1, {});
    cache.pre.assign(layers, {});
    cache.acts[0].assign(x.begin(), x.end());
    for (std::size_t l = 0; l < layers; ++l) {
        detail::affine(net.weights[l], net.biases[l], cache.acts[l], cache.pre[l]);
        cache.acts[l + 1] = cache.pre[l];
        if (l + 1 < layers)
            for (double& v : cache.acts[l + 1]) v = std::max(0.0, v);
    }
    return cache.acts[layers];
}

inline std::vector<double> forward(const QNetwork& net, std::span<const double> x) {
    ForwardCache cache;
    return forward_cached(net, x, cache);
}

/// Greedy action: argmax over q-values, lowest index on ties.
inline int argmax_action(const std::vector<double>& q) {
    if (q.empty()) throw std::invalid_argument("qnet: empty q-vector");
    int best = 0;
    for (int i = 1; i < static_cast<int>(q.size()); ++i)
        if (q[i] > q[best]) best = i;
    return best;
}

/// Bootstrap target with decoupled selection and evaluation: the online net
/// picks the next action, the target net scores it.
inline double double_dqn_target(const QNetwork& policy, const QNetwork& target, double r,
                                const Observation& s_next, bool done, double discount) {
    if (discount < 0.0 || discount > 1.0)
        throw std::invalid_argument("qnet: discount must lie in [0, 1]");
    if (done || discount == 0.0) return r;
    const auto q_online = forward(policy, s_next);
    const int a_star = argmax_action(q_online);
    const auto q_target = forward(target, s_next);
    return r + discount * q_target[a_star];
}

inline double td_error(const QNetwork& policy, const QNetwork& target, const Transition& t,
                       double discount) {
    const double y = double_dqn_target(policy, target, t.r, t.s_next, t.done, discount);
    return y - forward(policy, t.s)[t.a];
}

/// Fixed bootstrap targets for a batch; treated as constants by the loss and
/// its gradient.
inline std::vector<double> compute_targets(const QNetwork& policy, const QNetwork& target,
                                           const std::vector<Transition>& batch,
                                           double discount) {
    std::vector<double> y(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i)
        y[i] = double_dqn_target(policy, target, batch[i].r, batch[i].s_next, batch[i].done,
                                 discount);
    return y;
}

/// IS-weighted mean squared TD-error against fixed targets.
inline double batch_loss(const QNetwork& net, const std::vector<Transition>& batch,
                         const std::vector<double>& targets,
                         const std::vector<double>& weights) {
    if (batch.empty()) throw std::invalid_argument("qnet: empty batch");
    if (batch.size() != targets.size() || batch.size() != weights.size())
        throw std::invalid_argument("qnet: batch/targets/weights length mismatch");
    double loss = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const double q = forward(net, batch[i].s)[batch[i].a];
        const double delta = targets[i] - q;
        loss += weights[i] * delta * delta;
    }
    return loss / static_cast<double>(batch.size());
}

struct Gradients {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;
};

inline Gradients zero_gradients(const QNetwork& net) {
    Gradients g;
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        g.weights.emplace_back(net.weights[l].size(), 0.0);
        g.biases.emplace_back(net.biases[l].size(), 0.0);
    }
    return g;
}

/// Exact gradient of batch_loss with respect to every parameter.
inline Gradients batch_gradients(const QNetwork& net, const std::vector<Transition>& batch,
                                 const std::vector<double>& targets,
                                 const std::vector<double>& weights) {
    if (batch.empty()) throw std::invalid_argument("qnet: empty batch");
    if (batch.size() != targets.size() || batch.size() != weights.size())
        throw std::invalid_argument("qnet: batch/targets/weights length mismatch");
    Gradients g = zero_gradients(net);
    const std::size_t layers = net.layer_count();
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    ForwardCache cache;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto q = forward_cached(net, batch[i].s, cache);
        const double delta = targets[i] - q[batch[i].a];
        // dL/dq_a for this sample; all other outputs receive zero
        std::vector<double> grad_out(q.size(), 0.0);
        grad_out[batch[i].a] = -2.0 * inv_b * weights[i] * delta;
        for (std::size_t l = layers; l-- > 0;) {
            const std::vector<double>& a_in = cache.acts[l];
            std::vector<double> grad_in(a_in.size(), 0.0);
            const std::size_t n_out = grad_out.size();
            const std::size_t n_in = a_in.size();
            for (std::size_t o = 0; o < n_out; ++o) {
                const double go = grad_out[o];
                if (go == 0.0) continue;
                g.biases[l][o] += go;
                double* wrow = g.weights[l].data() + o * n_in;
                const double* row = net.weights[l].data() + o * n_in;
                for (std::size_t k = 0; k < n_in; ++k) {
                    wrow[k] += go * a_in[k];
                    grad_in[k] += go * row[k];
                }
            }
            if (l > 0) {
                // rectifier gate of the layer below
                for (std::size_t k = 0; k < grad_in.size(); ++k)
                    if (cache.pre[l - 1][k] <= 0.0) grad_in[k] = 0.0;
            }
            grad_out = std::move(grad_in);
        }
    }
    return g;
}

struct OptimizerState {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::uint64_t t = 0;
    std::vector<std::vector<double>> m_w, v_w, m_b, v_b;
};

inline OptimizerState make_optimizer(const QNetwork& net, double lr = 1e-4) {
    OptimizerState o;
    o.lr = lr;
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        o.m_w.emplace_back(net.weights[l].size(), 0.0);
        o.v_w.emplace_back(net.weights[l].size(), 0.0);
        o.m_b.emplace_back(net.biases[l].size(), 0.0);
        o.v_b.emplace_back(net.biases[l].size(), 0.0);
    }
    return o;
}

namespace detail {

inline void adam_update(std::vector<double>& p, const std::vector<double>& g,
                        std::vector<double>& m, std::vector<double>& v,
                        const OptimizerState& o, double bc1, double bc2) {
    for (std::size_t i = 0; i < p.size(); ++i) {
        m[i] = o.beta1 * m[i] + (1.0 - o.beta1) * g[i];
        v[i] = o.beta2 * v[i] + (1.0 - o.beta2) * g[i] * g[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        p[i] -= o.lr * mhat / (std::sqrt(vhat) + o.eps);
    }
}

}  // namespace detail

inline void adam_step(QNetwork& net, const Gradients& g, OptimizerState& opt) {
    if (g.weights.size() != net.layer_count())
        throw std::invalid_argument("qnet: gradient/network shape mismatch");
    opt.t += 1;
    const double bc1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.t));
    const double bc2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.t));
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        detail::adam_update(net.weights[l], g.weights[l], opt.m_w[l], opt.v_w[l], opt, bc1, bc2);
        detail::adam_update(net.biases[l], g.biases[l], opt.m_b[l], opt.v_b[l], opt, bc1, bc2);
    }
}

struct TrainStepResult {
    std::vector<double> abs_td;  // pre-update errors, for priority refresh
    double mean_loss = 0.0;
};

/// One learner update: double-DQN targets, IS-weighted squared-error loss,
/// exact gradients, one optimizer step. Targets are constants for the
/// gradient; the returned |delta| are measured before the parameter update.
inline TrainStepResult train_step(QNetwork& policy, const QNetwork& target, OptimizerState& opt,
                                  const std::vector<Transition>& batch,
                                  const std::vector<double>& is_weights, double discount) {
    const std::vector<double> y = compute_targets(policy, target, batch, discount);
    TrainStepResult res;
    res.abs_td.resize(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i)
        res.abs_td[i] = std::abs(y[i] - forward(policy, batch[i].s)[batch[i].a]);
    res.mean_loss = batch_loss(policy, batch, y, is_weights);
    if (!std::isfinite(res.mean_loss))
        throw std::runtime_error("qnet: non-finite loss, training diverged");
    const Gradients g = batch_gradients(policy, batch, y, is_weights);
    adam_step(policy, g, opt);
    return res;
}

/// Hard synchronization of the target parameters onto the policy's.
inline void sync_target(const QNetwork& policy, QNetwork& target) {
    if (policy.sizes != target.sizes)
        throw std::invalid_argument("qnet: cannot sync networks of different shapes");
    target.weights = policy.weights;
    target.biases = policy.biases;
}

// ---------------------------------------------------------------------------
// Flat parameter view (used by the finite-difference gradient oracle)
// ---------------------------------------------------------------------------

inline std::size_t param_count(const QNetwork& net) {
    std::size_t n = 0;
    for (std::size_t l = 0; l < net.layer_count(); ++l)
        n += net.weights[l].size() + net.biases[l].size();
    return n;
}

inline double get_param(const QNetwork& net, std::size_t idx) {
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        if (idx < net.weights[l].size()) return net.weights[l][idx];
        idx -= net.weights[l].size();
        if (idx < net.biases[l].size()) return net.biases[l][idx];
        idx -= net.biases[l].size();
    }
    throw std::out_of_range("qnet: parameter index out of range");
}

inline void set_param(QNetwork& net, std::size_t idx, double value) {
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        if (idx < net.weights[l].size()) {
            net.weights[l][idx] = value;
            return;
        }
        idx -= net.weights[l].size();
        if (idx < net.biases[l].size()) {
            net.biases[l][idx] = value;
            return;
        }
        idx -= net.biases[l].size();
    }
    throw std::out_of_range("qnet: parameter index out of range");
}

inline double get_gradient(const Gradients& g, std::size_t idx) {
    for (std::size_t l = 0; l < g.weights.size(); ++l) {
        if (idx < g.weights[l].size()) return g.weights[l][idx];
        idx -= g.weights[l].size();
        if (idx < g.biases[l].size()) return g.biases[l][idx];
        idx -= g.biases[l].size();
    }
    throw std::out_of_range("qnet: gradient index out of range");
}

// ---------------------------------------------------------------------------
// Checkpoint format: "QNCK", u32 layer-size count, u32 sizes..., then per
// layer the row-major weight matrix followed by the bias vector, all 64-bit
// little-endian floats.
// ---------------------------------------------------------------------------

namespace detail {

inline void put_u32_le(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t get_u32_le(std::istream& is) {
    unsigned char b[4] = {};
    is.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline void put_f64_le(std::ostream& os, double d) {
    std::uint64_t v = std::bit_cast<std::uint64_t>(d);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

inline double get_f64_le(std::istream& is) {
    unsigned char b[8] = {};
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<double>(v);
}

}  // namespace detail

inline void save_checkpoint(const QNetwork& net, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("qnet: cannot open checkpoint for writing: " + path);
    os.write("QNCK", 4);
    detail::put_u32_le(os, static_cast<std::uint32_t>(net.sizes.size()));
    for (int s : net.sizes) detail::put_u32_le(os, static_cast<std::uint32_t>(s));
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        for (double w : net.weights[l]) detail::put_f64_le(os, w);
        for (double b : net.biases[l]) detail::put_f64_le(os, b);
    }
    if (!os) throw std::runtime_error("qnet: checkpoint write failed: " + path);
}

inline QNetwork load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("qnet: cannot open checkpoint: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "QNCK", 4) != 0)
        throw std::runtime_error("qnet: bad checkpoint magic in " + path);
    const std::uint32_t n = detail::get_u32_le(is);
    if (n < 2 || n > 64) throw std::runtime_error("qnet: implausible layer count in " + path);
    std::vector<int> sizes(n);
    for (auto& s : sizes) s = static_cast<int>(detail::get_u32_le(is));
    QNetwork net = make_network(sizes);
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        for (double& w : net.weights[l]) w = detail::get_f64_le(is);
        for (double& b : net.biases[l]) b = detail::get_f64_le(is);
    }
    if (!is) throw std::runtime_error("qnet: truncated checkpoint: " + path);
    return net;
}

}  // namespace uavpe
