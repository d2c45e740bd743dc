// Training orchestration: several differently-seeded environment workers
// with per-environment exploration rates feed one prioritized replay buffer;
// a single learner samples batches, refreshes priorities and periodically
// hard-syncs the target network. Phases follow a curriculum plan; cooperative
// phases train one role while the other runs a frozen checkpoint.
#pragma once

#include <atomic>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "uavpe/arena.hpp"
#include "uavpe/qnet.hpp"
#include "uavpe/replay.hpp"
#include "uavpe/rng.hpp"

namespace uavpe {

/// Frozen policy view: parameters plus the greedy rule.
struct PolicySnapshot {
    QNetwork net;
};

inline int greedy_action(const QNetwork& net, const Observation& obs) {
    return argmax_action(forward(net, obs));
}

inline int epsilon_greedy(const PolicySnapshot& snap, const Observation& obs, double eps,
                          std::mt19937_64& rng) {
    if (eps < 0.0 || eps > 1.0) throw std::invalid_argument("epsilon_greedy: eps outside [0, 1]");
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    if (u01(rng) < eps) {
        std::uniform_int_distribution<int> ua(0, snap.net.output_dim() - 1);
        return ua(rng);
    }
    return greedy_action(snap.net, obs);
}

struct WorkerSpec {
    int env_id = 0;
    ScenarioConfig scenario;
    double epsilon = 0.1;
    int snapshot_refresh = 200;  // decision steps between policy snapshot pulls
};

struct TrainerConfig {
    int workers = 4;
    std::vector<double> epsilon_ladder = {0.05, 0.1, 0.2, 0.4};
    double gamma = 0.95;
    int batch_size = 1024;
    int target_sync_period = 1000;  // train steps between hard target syncs
    int train_every = 4;            // collected transitions per train step
    int warmup_min = 5000;          // buffer fill before learning starts
    int snapshot_refresh = 200;
    double lr = 1e-4;
    bool deterministic = false;  // single-threaded, bit-reproducible

    int warmup(int batch) const { return std::max(batch, warmup_min); }

    void validate() const {
        if (workers < 1) throw std::invalid_argument("trainer: need at least one worker");
        if (epsilon_ladder.empty())
            throw std::invalid_argument("trainer: epsilon ladder cannot be empty");
        for (double e : epsilon_ladder)
            if (e < 0.0 || e > 1.0)
                throw std::invalid_argument("trainer: epsilon outside [0, 1]");
        if (gamma < 0.0 || gamma > 1.0)
            throw std::invalid_argument("trainer: gamma outside [0, 1]");
        if (batch_size < 1) throw std::invalid_argument("trainer: batch_size must be positive");
        if (target_sync_period < 1 || train_every < 1 || snapshot_refresh < 1)
            throw std::invalid_argument("trainer: periods must be positive");
        if (!(lr > 0.0)) throw std::invalid_argument("trainer: lr must be positive");
    }
};

struct TrainPhase {
    std::string name;
    ScenarioConfig scenario;
    long long budget = 0;  // transitions to collect in this phase
    Role training_role = Role::pursuit;
    std::map<Role, std::string> frozen;  // role -> checkpoint path
    bool mixed_blue = false;  // cycle straight/circling/random per episode
};

struct TrainPlan {
    std::string name;
    std::vector<TrainPhase> phases;

    long long total_budget() const {
        long long n = 0;
        for (const auto& p : phases) n += p.budget;
        return n;
    }

    void validate() const {
        if (phases.empty()) throw std::invalid_argument("plan: no phases");
        for (const auto& p : phases) {
            if (p.budget <= 0) throw std::invalid_argument("plan: phase budgets must be positive");
            p.scenario.validate();
        }
    }
};

/// Atomic read access to the live policy for rollout workers; copies are
/// taken under the learner's parameter mutex so no torn read is possible.
class SnapshotProvider {
  public:
    SnapshotProvider(const QNetwork& source, std::mutex& mu) : source_(source), mu_(mu) {}

    QNetwork snapshot() const {
        std::lock_guard<std::mutex> lock(mu_);
        return source_;
    }

  private:
    const QNetwork& source_;
    std::mutex& mu_;
};

// ---------------------------------------------------------------------------
// Metrics stream
// ---------------------------------------------------------------------------

struct MetricsRow {
    long long global_step = 0;
    std::string phase;
    long long episode = 0;
    double episode_reward = 0.0;
    double mean_loss = 0.0;
    double mean_abs_td = 0.0;
    double epsilon = 0.0;
    std::size_t buffer_size = 0;
    double buffer_root_sum = 0.0;
    double buffer_mean_priority = 0.0;
};

/// Append-only CSV with a comment header naming the config hash and the
/// algorithm variant in effect.
class MetricsWriter {
  public:
    void open(const std::string& path, const std::string& config_hash,
              const std::string& variant) {
        std::lock_guard<std::mutex> lock(mu_);
        os_.open(path, std::ios::trunc);
        if (!os_) throw std::runtime_error("metrics: cannot open " + path);
        os_ << "# config_hash=" << config_hash << "\n";
        os_ << "# variant=" << variant << "\n";
        os_ << "global_step,phase,episode,episode_reward,mean_loss,mean_abs_td,epsilon,"
               "buffer_size,buffer_root_sum,buffer_mean_priority\n";
    }

    void write(const MetricsRow& r) {
        std::lock_guard<std::mutex> lock(mu_);
        if (!os_.is_open()) return;
        os_ << r.global_step << ',' << r.phase << ',' << r.episode << ',' << fmt(r.episode_reward)
            << ',' << fmt(r.mean_loss) << ',' << fmt(r.mean_abs_td) << ',' << fmt(r.epsilon)
            << ',' << r.buffer_size << ',' << fmt(r.buffer_root_sum) << ','
            << fmt(r.buffer_mean_priority) << '\n';
    }

    void close() {
        std::lock_guard<std::mutex> lock(mu_);
        if (os_.is_open()) os_.close();
    }

    static std::string fmt(double v) {
        std::ostringstream ss;
        ss << std::setprecision(17) << v;
        return ss.str();
    }

  private:
    std::ofstream os_;
    std::mutex mu_;
};

// ---------------------------------------------------------------------------
// Environment worker
// ---------------------------------------------------------------------------

/// One rollout environment. Training-role UAVs act epsilon-greedily on the
/// worker's policy snapshot; other roles run their frozen nets greedily. Only
/// training-role transitions enter the buffer.
class EnvWorker {
  public:
    EnvWorker(const Arena& arena, const WorkerSpec& spec, std::uint64_t phase_root,
              Role training_role, const std::map<Role, QNetwork>* frozen, bool mixed_blue)
        : arena_(arena), spec_(spec), root_(phase_root), training_role_(training_role),
          frozen_(frozen), mixed_blue_(mixed_blue),
          explore_rng_(make_stream(phase_root, "worker.explore", spec.env_id)) {
        arena_.scenario = spec.scenario;
    }

    /// Advance one decision step (starting a fresh episode when needed).
    /// Returns the number of transitions inserted; fires on_episode with
    /// (mean training-red return, epsilon) when an episode just finished.
    int step_once(ReplayBuffer& buffer, const SnapshotProvider& provider,
                  const std::function<void(double, double)>& on_episode) {
        if (!world_ready_ || world_.over) start_episode();
        if (steps_since_refresh_ >= spec_.snapshot_refresh || !snapshot_ready_) refresh(provider);

        if (world_.step_count > 0 && world_.step_count % arena_.scenario.realloc_period == 0)
            arena_.allocate(world_);

        const ObsNormalizer nz = arena_.normalizer();
        std::vector<int> acting;
        std::vector<Role> roles;
        std::vector<Observation> obs;
        std::vector<int> actions;
        for (int i = 0; i < static_cast<int>(world_.red.size()); ++i) {
            if (!world_.red[i].alive) continue;
            acting.push_back(i);
            roles.push_back(world_.red[i].role);
            obs.push_back(observe(world_.red[i].s, world_.blue[world_.red[i].target].s, nz));
            if (roles.back() == training_role_) {
                actions.push_back(epsilon_greedy(snapshot_, obs.back(), spec_.epsilon, explore_rng_));
            } else {
                actions.push_back(greedy_action(frozen_net(roles.back()), obs.back()));
            }
        }

        StepResult sr = arena_.world_step(world_, actions);
        int inserted = 0;
        for (std::size_t k = 0; k < acting.size(); ++k) {
            if (roles[k] != training_role_) continue;
            Transition t;
            t.s = obs[k];
            t.a = actions[k];
            t.r = sr.rewards[k];
            t.s_next = sr.next_obs[k];
            t.done = sr.done[k];
            buffer.insert(t);
            ++inserted;
            ep_reward_ += sr.rewards[k];
        }
        ++decision_steps_;
        ++steps_since_refresh_;

        if (world_.over) {
            const double mean_ret = ep_reward_ / std::max(1, ep_training_reds_);
            on_episode(mean_ret, spec_.epsilon);
        }
        return inserted;
    }

    long long decision_steps() const { return decision_steps_; }

  private:
    void start_episode() {
        if (mixed_blue_) {
            const BluePolicyKind cycle[3] = {BluePolicyKind::scripted_straight,
                                             BluePolicyKind::scripted_circling,
                                             BluePolicyKind::scripted_random};
            arena_.scenario.blue_policy = cycle[episode_idx_ % 3];
        }
        const std::uint64_t ep_seed =
            derive_seed(root_, "worker." + std::to_string(spec_.env_id) + ".episode",
                        static_cast<std::uint64_t>(episode_idx_));
        auto rng = make_stream(ep_seed, "episode.init");
        world_ = arena_.initialize(rng);
        arena_.allocate(world_);
        ep_training_reds_ = 0;
        for (const auto& u : world_.red)
            if (u.role == training_role_) ++ep_training_reds_;
        if (ep_training_reds_ == 0)
            throw std::runtime_error(
                std::string("worker: scenario allocates no red UAV to the training role ") +
                role_name(training_role_) + " (bait training needs fixed_roles)");
        ep_reward_ = 0.0;
        world_ready_ = true;
        ++episode_idx_;
    }

    void refresh(const SnapshotProvider& provider) {
        snapshot_.net = provider.snapshot();
        snapshot_ready_ = true;
        steps_since_refresh_ = 0;
    }

    const QNetwork& frozen_net(Role r) const {
        if (!frozen_) throw std::runtime_error("worker: no frozen policies available");
        auto it = frozen_->find(r);
        if (it == frozen_->end())
            throw std::runtime_error(std::string("worker: missing frozen policy for role ") +
                                     role_name(r));
        return it->second;
    }

    Arena arena_;
    WorkerSpec spec_;
    std::uint64_t root_;
    Role training_role_;
    const std::map<Role, QNetwork>* frozen_;
    bool mixed_blue_;
    EngagementWorld world_;
    bool world_ready_ = false;
    PolicySnapshot snapshot_;
    bool snapshot_ready_ = false;
    int steps_since_refresh_ = 0;
    long long episode_idx_ = 0;
    long long decision_steps_ = 0;
    double ep_reward_ = 0.0;
    int ep_training_reds_ = 1;
    std::mt19937_64 explore_rng_;
};

// ---------------------------------------------------------------------------
// Trainer
// ---------------------------------------------------------------------------

struct TrainResult {
    std::map<Role, QNetwork> policies;
    std::vector<std::string> checkpoint_paths;
    long long episodes = 0;
    long long train_steps = 0;
    long long collected = 0;
};

class Trainer {
  public:
    Trainer(const TrainerConfig& cfg, const PhysicsConfig& physics,
            const EngagementConfig& engagement, const RewardConfig& rewards,
            const PerConfig& per, const std::vector<int>& net_sizes, std::uint64_t seed)
        : cfg_(cfg), physics_(physics), engagement_(engagement), rewards_(rewards), per_(per),
          net_sizes_(net_sizes), seed_(seed) {
        cfg.validate();
        per.validate();
        for (Role role : {Role::pursuit, Role::bait}) {
            auto rng = make_stream(seed_, std::string("init.") + role_name(role));
            QNetwork net = make_network(net_sizes_);
            init_uniform_fanin(net, rng);
            policies_[role] = net;
            targets_[role] = net;
            optimizers_[role] = make_optimizer(net, cfg_.lr);
        }
    }

    /// The algorithm variant a configuration runs: the plain uniform-replay
    /// double-DQN baseline emerges when there is one environment, one
    /// exploration rate, and a neutral priority exponent.
    std::string variant_label() const {
        const bool single_eps = cfg_.epsilon_ladder.size() == 1;
        if (cfg_.workers == 1 && per_.a_per == 0.0 && single_eps) return "ddqn_uniform";
        return "meaddqn_per";
    }

    TrainResult train(const TrainPlan& plan, const std::string& out_dir,
                      const std::string& config_hash) {
        plan.validate();
        metrics_.open(out_dir + "/metrics.csv", config_hash, variant_label());
        expected_train_steps_ =
            std::max<long long>(1, plan.total_budget() / cfg_.train_every);
        TrainResult result;
        for (std::size_t pi = 0; pi < plan.phases.size(); ++pi) {
            const TrainPhase& phase = plan.phases[pi];
            begin_phase(phase, pi);
            if (cfg_.deterministic || cfg_.workers == 1) {
                run_phase_deterministic(phase, pi);
            } else {
                run_phase_threaded(phase, pi);
            }
            const std::string ckpt = out_dir + "/ckpt_phase" + std::to_string(pi) + "_" +
                                     phase.name + "_" + role_name(phase.training_role) + ".ckpt";
            save_checkpoint(policies_[phase.training_role], ckpt);
            write_sidecar(ckpt + ".json", phase, config_hash);
            result.checkpoint_paths.push_back(ckpt);
        }
        metrics_.close();
        result.policies = policies_;
        result.episodes = episodes_;
        result.train_steps = train_steps_;
        result.collected = collected_;
        return result;
    }

    const QNetwork& policy(Role r) const { return policies_.at(r); }

  private:
    void begin_phase(const TrainPhase& phase, std::size_t phase_idx) {
        // a new training role invalidates the replay contents (rewards are
        // role-specific), as does the very first phase
        if (!buffer_ || phase.training_role != current_role_) {
            buffer_ = std::make_unique<ReplayBuffer>(
                per_, derive_seed(seed_, "replay.sample", phase_idx));
            warmed_ = false;
            pending_ = 0;
        }
        current_role_ = phase.training_role;
        for (const auto& [role, path] : phase.frozen) {
            QNetwork net = load_checkpoint(path);
            if (net.sizes != net_sizes_)
                throw std::runtime_error("trainer: frozen checkpoint shape mismatch: " + path);
            policies_[role] = net;
            targets_[role] = net;
        }
    }

    std::vector<EnvWorker> make_workers(const TrainPhase& phase, std::size_t phase_idx) {
        Arena arena(physics_, engagement_, rewards_, phase.scenario);
        const std::uint64_t phase_root = derive_seed(seed_, "phase", phase_idx);
        std::vector<EnvWorker> workers;
        for (int w = 0; w < cfg_.workers; ++w) {
            WorkerSpec spec;
            spec.env_id = w;
            spec.scenario = phase.scenario;
            spec.epsilon = cfg_.epsilon_ladder[w % cfg_.epsilon_ladder.size()];
            spec.snapshot_refresh = cfg_.snapshot_refresh;
            workers.emplace_back(arena, spec, phase_root, phase.training_role, &policies_,
                                 phase.mixed_blue);
        }
        return workers;
    }

    void run_phase_deterministic(const TrainPhase& phase, std::size_t phase_idx) {
        auto workers = make_workers(phase, phase_idx);
        SnapshotProvider provider(policies_[phase.training_role], param_mu_);
        long long phase_collected = 0;
        auto on_episode = [&](double reward, double eps) { episode_row(phase, reward, eps); };
        while (phase_collected < phase.budget) {
            for (auto& w : workers) {
                const int n = w.step_once(*buffer_, provider, on_episode);
                phase_collected += n;
                collected_ += n;
                pace_learner(n);
                if (phase_collected >= phase.budget) break;
            }
        }
    }

    void run_phase_threaded(const TrainPhase& phase, std::size_t phase_idx) {
        auto workers = make_workers(phase, phase_idx);
        SnapshotProvider provider(policies_[phase.training_role], param_mu_);
        std::atomic<long long> phase_collected{0};
        std::atomic<bool> stop{false};
        std::vector<std::exception_ptr> errors(workers.size());
        auto on_episode = [&](double reward, double eps) { episode_row(phase, reward, eps); };

        std::vector<std::thread> threads;
        for (std::size_t wi = 0; wi < workers.size(); ++wi) {
            threads.emplace_back([&, wi] {
                try {
                    while (!stop.load(std::memory_order_relaxed)) {
                        const int n = workers[wi].step_once(*buffer_, provider, on_episode);
                        if (phase_collected.fetch_add(n) + n >= phase.budget) stop = true;
                    }
                } catch (...) {
                    errors[wi] = std::current_exception();
                    stop = true;
                }
            });
        }
        // learner paced against the collection counter
        long long last_seen = 0;
        while (!stop.load(std::memory_order_relaxed)) {
            const long long now = phase_collected.load(std::memory_order_relaxed);
            const long long fresh = now - last_seen;
            if (fresh > 0) {
                last_seen = now;
                collected_ += fresh;
                pace_learner(fresh);
            } else {
                std::this_thread::yield();
            }
        }
        for (auto& t : threads) t.join();
        const long long now = phase_collected.load();
        collected_ += now - last_seen;
        pace_learner(now - last_seen);
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    void pace_learner(long long fresh_transitions) {
        const int warmup = cfg_.warmup(cfg_.batch_size);
        if (!warmed_) {
            if (buffer_->size() < static_cast<std::size_t>(warmup)) return;
            warmed_ = true;
            pending_ = 0;
            return;
        }
        pending_ += fresh_transitions;
        while (pending_ >= cfg_.train_every) {
            pending_ -= cfg_.train_every;
            learner_step();
        }
    }

    void learner_step() {
        buffer_->set_beta(annealed_beta(per_, static_cast<std::uint64_t>(train_steps_),
                                        static_cast<std::uint64_t>(expected_train_steps_)));
        SampleBatch batch = buffer_->sample(cfg_.batch_size);
        TrainStepResult res;
        {
            std::lock_guard<std::mutex> lock(param_mu_);
            res = train_step(policies_[current_role_], targets_[current_role_],
                             optimizers_[current_role_], batch.items, batch.weights, cfg_.gamma);
            ++train_steps_;
            if (train_steps_ % cfg_.target_sync_period == 0)
                sync_target(policies_[current_role_], targets_[current_role_]);
        }
        buffer_->update_priorities(batch.refs, res.abs_td);
        double sum_td = 0.0;
        for (double d : res.abs_td) sum_td += d;
        std::lock_guard<std::mutex> lock(stats_mu_);
        loss_accum_ += res.mean_loss;
        td_accum_ += sum_td / static_cast<double>(res.abs_td.size());
        ++stat_steps_;
    }

    void episode_row(const TrainPhase& phase, double reward, double eps) {
        MetricsRow row;
        {
            std::lock_guard<std::mutex> lock(stats_mu_);
            ++episodes_;
            row.episode = episodes_;
            row.mean_loss = stat_steps_ ? loss_accum_ / stat_steps_ : 0.0;
            row.mean_abs_td = stat_steps_ ? td_accum_ / stat_steps_ : 0.0;
            loss_accum_ = td_accum_ = 0.0;
            stat_steps_ = 0;
        }
        row.global_step = collected_;
        row.phase = phase.name;
        row.episode_reward = reward;
        row.epsilon = eps;
        const auto st = buffer_->stats();
        row.buffer_size = st.size;
        row.buffer_root_sum = st.root_sum;
        row.buffer_mean_priority = st.mean_priority;
        metrics_.write(row);
    }

    void write_sidecar(const std::string& path, const TrainPhase& phase,
                       const std::string& config_hash) {
        std::ofstream os(path, std::ios::trunc);
        if (!os) throw std::runtime_error("trainer: cannot write sidecar " + path);
        os << "{\n";
        os << "  \"phase\": \"" << phase.name << "\",\n";
        os << "  \"step\": " << collected_ << ",\n";
        os << "  \"config_hash\": \"" << config_hash << "\",\n";
        os << "  \"role\": \"" << role_name(phase.training_role) << "\"\n";
        os << "}\n";
    }

    TrainerConfig cfg_;
    PhysicsConfig physics_;
    EngagementConfig engagement_;
    RewardConfig rewards_;
    PerConfig per_;
    std::vector<int> net_sizes_;
    std::uint64_t seed_;

    std::map<Role, QNetwork> policies_, targets_;
    std::map<Role, OptimizerState> optimizers_;
    Role current_role_ = Role::pursuit;
    std::unique_ptr<ReplayBuffer> buffer_;
    bool warmed_ = false;
    long long pending_ = 0;
    std::atomic<long long> collected_{0};
    long long train_steps_ = 0;
    long long expected_train_steps_ = 1;
    long long episodes_ = 0;
    double loss_accum_ = 0.0, td_accum_ = 0.0;
    long long stat_steps_ = 0;
    MetricsWriter metrics_;
    std::mutex param_mu_;
    std::mutex stats_mu_;
};

}  // namespace uavpe
