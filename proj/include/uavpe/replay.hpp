// Prioritized experience replay: a sum-tree over transition priorities with
// proportional stratified sampling and importance-sampling corrections.
//
// Multiple rollout workers insert concurrently while one learner samples and
// refreshes priorities; a single coarse mutex linearizes all three operations.
#pragma once

#include <cmath>
#include <cstdint>
#include <mutex>
#include <random>
#include <stdexcept>
#include <vector>

#include "uavpe/engagement.hpp"

namespace uavpe {

/// One experience record. The buffer keeps the authoritative priority in its
/// tree; the copy here mirrors the value set at insert/update time.
struct Transition {
    Observation s{};
    int a = 0;
    double r = 0.0;
    Observation s_next{};
    bool done = false;
    double priority = 0.0;
};

struct PerConfig {
    std::size_t capacity = 100000;
    double a_per = 0.6;       // priority exponent; 0 degenerates to uniform
    double b_start = 0.4;     // IS exponent at the start of training
    double b_end = 1.0;       // IS exponent at the end of training
    double epsilon_per = 0.01;  // priority floor added to |delta|

    void validate() const {
        if (capacity < 1) throw std::invalid_argument("replay: capacity must be >= 1");
        if (a_per < 0.0 || a_per > 1.0)
            throw std::invalid_argument("replay: a_per must lie in [0, 1]");
        if (b_start < 0.0 || b_start > 1.0 || b_end < 0.0 || b_end > 1.0)
            throw std::invalid_argument("replay: b_per must lie in [0, 1]");
        if (!(epsilon_per > 0.0))
            throw std::invalid_argument("replay: epsilon_per must be positive");
    }
};

/// Fixed-capacity binary indexed sum tree. Leaves hold priorities, node i is
/// the sum of its children, the root (node 1) the total mass. Capacity is
/// rounded up to a power of two so leaves occupy [cap, 2*cap).
class SumTree {
  public:
    explicit SumTree(std::size_t capacity) {
        cap_ = 1;
        while (cap_ < capacity) cap_ <<= 1;
        nodes_.assign(2 * cap_, 0.0);
    }

    std::size_t capacity() const { return cap_; }
    double total() const { return nodes_[1]; }
    double get(std::size_t leaf) const { return nodes_[cap_ + leaf]; }

    void set(std::size_t leaf, double p) {
        if (leaf >= cap_) throw std::out_of_range("sum tree: leaf out of range");
        if (!(p >= 0.0) || !std::isfinite(p))
            throw std::invalid_argument("sum tree: priority must be finite and non-negative");
        std::size_t i = cap_ + leaf;
        nodes_[i] = p;
        for (i >>= 1; i >= 1; i >>= 1) {
            nodes_[i] = nodes_[2 * i] + nodes_[2 * i + 1];
            if (i == 1) break;
        }
    }

    /// Locate the leaf whose prefix interval contains cumulative value c.
    std::size_t find_prefix(double c) const {
        if (total() <= 0.0) throw std::runtime_error("sum tree: empty mass");
        if (c < 0.0) c = 0.0;
        std::size_t i = 1;
        while (i < cap_) {
            const double left = nodes_[2 * i];
            if (c < left) {
                i = 2 * i;
            } else {
                c -= left;
                i = 2 * i + 1;
            }
        }
        return i - cap_;
    }

  private:
    std::size_t cap_ = 1;
    std::vector<double> nodes_;
};

/// Handle returned by sample() so a later priority update can detect that the
/// slot was overwritten in between (stale handles are skipped silently).
struct SampleRef {
    std::size_t leaf = 0;
    std::uint64_t stamp = 0;
};

struct SampleBatch {
    std::vector<Transition> items;
    std::vector<SampleRef> refs;
    std::vector<double> weights;
};

class ReplayBuffer {
  public:
    ReplayBuffer(const PerConfig& cfg, std::uint64_t seed)
        : cfg_(cfg), tree_(cfg.capacity), data_(cfg.capacity), stamps_(cfg.capacity, 0),
          beta_(cfg.b_start), rng_(seed) {
        cfg.validate();
    }

    /// Store a transition with priority (|delta| + epsilon)^a, evicting the
    /// oldest record once full.
    void insert(const Transition& t, double abs_td) {
        std::lock_guard<std::mutex> lock(mu_);
        insert_locked(t, abs_td);
    }

    /// Store a new transition at the maximal |delta| seen so far, so it is
    /// sampled at least once before its own TD-error is known.
    void insert(const Transition& t) {
        std::lock_guard<std::mutex> lock(mu_);
        insert_locked(t, max_abs_td_);
    }

    /// Stratified proportional sampling: the total mass is cut into
    /// batch_size equal segments with one uniform draw each. IS-weights are
    /// (N * P(i))^-beta, normalized by the batch maximum.
    SampleBatch sample(std::size_t batch_size) {
        std::lock_guard<std::mutex> lock(mu_);
        if (batch_size == 0) throw std::invalid_argument("replay: batch_size must be positive");
        if (size_ < batch_size) throw std::runtime_error("replay: buffer underfilled");
        SampleBatch out;
        out.items.reserve(batch_size);
        out.refs.reserve(batch_size);
        out.weights.reserve(batch_size);
        const double total = tree_.total();
        const double seg = total / static_cast<double>(batch_size);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        const double n = static_cast<double>(size_);
        double wmax = 0.0;
        for (std::size_t k = 0; k < batch_size; ++k) {
            const double c = (static_cast<double>(k) + u01(rng_)) * seg;
            std::size_t leaf = tree_.find_prefix(std::min(c, std::nextafter(total, 0.0)));
            if (leaf >= size_) leaf = size_ - 1;  // roundoff guard at the occupied edge
            const double p = tree_.get(leaf) / total;
            const double w = std::pow(n * p, -beta_);
            out.items.push_back(data_[leaf]);
            out.refs.push_back({leaf, stamps_[leaf]});
            out.weights.push_back(w);
            wmax = std::max(wmax, w);
        }
        for (double& w : out.weights) w /= wmax;
        return out;
    }

    /// Refresh priorities after a train step. Refs whose slot has been
    /// overwritten since sampling are skipped.
    void update_priorities(const std::vector<SampleRef>& refs,
                           const std::vector<double>& abs_td) {
        if (refs.size() != abs_td.size())
            throw std::invalid_argument("replay: refs/priorities length mismatch");
        std::lock_guard<std::mutex> lock(mu_);
        for (std::size_t i = 0; i < refs.size(); ++i) {
            const auto& ref = refs[i];
            if (ref.leaf >= size_ || stamps_[ref.leaf] != ref.stamp) continue;
            const double p = transform(abs_td[i]);
            tree_.set(ref.leaf, p);
            data_[ref.leaf].priority = p;
            max_abs_td_ = std::max(max_abs_td_, abs_td[i]);
        }
    }

    void set_beta(double b) {
        std::lock_guard<std::mutex> lock(mu_);
        beta_ = std::clamp(b, 0.0, 1.0);
    }

    double beta() const {
        std::lock_guard<std::mutex> lock(mu_);
        return beta_;
    }

    std::size_t size() const {
        std::lock_guard<std::mutex> lock(mu_);
        return size_;
    }

    std::size_t capacity() const { return cfg_.capacity; }

    struct Stats {
        std::size_t size = 0;
        double root_sum = 0.0;
        double mean_priority = 0.0;
    };

    Stats stats() const {
        std::lock_guard<std::mutex> lock(mu_);
        Stats s;
        s.size = size_;
        s.root_sum = tree_.total();
        s.mean_priority = size_ ? s.root_sum / static_cast<double>(size_) : 0.0;
        return s;
    }

  private:
    double transform(double abs_td) const {
        return std::pow(abs_td + cfg_.epsilon_per, cfg_.a_per);
    }

    void insert_locked(const Transition& t, double abs_td) {
        if (!(abs_td >= 0.0) || !std::isfinite(abs_td))
            throw std::invalid_argument("replay: |td| must be finite and non-negative");
        const double p = transform(abs_td);
        data_[cursor_] = t;
        data_[cursor_].priority = p;
        stamps_[cursor_] = ++stamp_counter_;
        tree_.set(cursor_, p);
        max_abs_td_ = std::max(max_abs_td_, abs_td);
        cursor_ = (cursor_ + 1) % cfg_.capacity;
        size_ = std::min(size_ + 1, cfg_.capacity);
    }

    PerConfig cfg_;
    SumTree tree_;
    std::vector<Transition> data_;
    std::vector<std::uint64_t> stamps_;
    std::size_t cursor_ = 0;
    std::size_t size_ = 0;
    std::uint64_t stamp_counter_ = 0;
    double max_abs_td_ = 1.0;
    double beta_;
    std::mt19937_64 rng_;
    mutable std::mutex mu_;
};

/// Linear beta annealing from b_start to b_end over a training run.
inline double annealed_beta(const PerConfig& cfg, std::uint64_t step, std::uint64_t total_steps) {
    if (total_steps == 0) return cfg.b_end;
    const double f = std::min(1.0, static_cast<double>(step) / static_cast<double>(total_steps));
    return cfg.b_start + (cfg.b_end - cfg.b_start) * f;
}

}  // namespace uavpe
