// Release acceptance gate. Every shipped behavior gets one self-contained
// check that prints a single PASS or FAIL line; the process exits nonzero if
// any check fails. The desk-scale training checks run real (small) training
// jobs, so the whole gate takes a few minutes.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "uavpe/cli.hpp"

using namespace uavpe;

namespace {

struct CheckResult {
    bool pass = false;
    std::string detail;
};

// artifacts shared between checks: the desk-scale training runs feed the
// cooperative evaluation
struct SharedArtifacts {
    std::string pursuit_ckpt;
    std::string bait_ckpt;
};

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::vector<double> metrics_episode_rewards(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    std::vector<double> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("global_step", 0) == 0) continue;
        std::stringstream ss(line);
        std::string field;
        for (int i = 0; i < 4 && std::getline(ss, field, ','); ++i) {}
        out.push_back(std::stod(field));
    }
    return out;
}

// moving average whose window grows up to 100 episodes
std::vector<double> moving_average_100(const std::vector<double>& x) {
    std::vector<double> ma(x.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sum += x[i];
        if (i >= 100) sum -= x[i - 100];
        ma[i] = sum / static_cast<double>(std::min<std::size_t>(i + 1, 100));
    }
    return ma;
}

double mean_of(const std::vector<double>& x, std::size_t begin, std::size_t end) {
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += x[i];
    return s / static_cast<double>(end - begin);
}

std::string fmt2(double v) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(2) << v;
    return ss.str();
}

// ---------------------------------------------------------------------------
// 1. level-trim controls leave speed, climb angle and heading untouched
// ---------------------------------------------------------------------------

CheckResult check_trim_hold() {
    const PhysicsConfig phys;
    const ManeuverCatalog& cat = ManeuverCatalog::standard();
    const int hold = cat.index_of("hold_straight");
    double worst = 0.0;
    for (const auto& [v0, psi0] : std::vector<std::pair<double, double>>{
             {200.0, 0.7}, {300.0, -2.0}, {120.0, 3.0}}) {
        UavState s;
        s.z = 7000.0;
        s.v = v0;
        s.psi = psi0;
        UavState r = s;
        for (int i = 0; i < 1000; ++i) r = step(r, resolve_action(hold, r, cat, phys), phys);
        worst = std::max({worst, std::fabs(r.v - v0), std::fabs(r.gamma),
                          std::fabs(r.psi - psi0)});
    }
    return {worst < 1e-9, "max drift over 1000 steps = " + std::to_string(worst)};
}

// ---------------------------------------------------------------------------
// 2. accumulated heading in a sustained turn matches a fine-step reference
// ---------------------------------------------------------------------------

double accumulated_heading(const PhysicsConfig& phys, int action, double total_time) {
    const ManeuverCatalog& cat = ManeuverCatalog::standard();
    UavState s;
    s.z = 7000.0;
    s.v = 200.0;
    const long long steps = std::llround(total_time / phys.decision_interval());
    double acc = 0.0;
    double prev = s.psi;
    for (long long i = 0; i < steps; ++i) {
        s = step(s, resolve_action(action, s, cat, phys), phys);
        acc += std::remainder(s.psi - prev, 2.0 * kPi);
        prev = s.psi;
    }
    return acc;
}

CheckResult check_turn_rate() {
    const ManeuverCatalog& cat = ManeuverCatalog::standard();
    PhysicsConfig coarse;  // 0.05 s RK4, two substeps per decision
    PhysicsConfig fine;
    fine.dt = 1e-4;
    fine.substeps = 1;
    double worst = 0.0;
    std::string detail;
    for (const char* name : {"hold_left", "fast_left", "hold_right"}) {
        const int a = cat.index_of(name);
        const double dc = accumulated_heading(coarse, a, 10.0);
        const double df = accumulated_heading(fine, a, 10.0);
        const double rel = std::fabs(dc - df) / std::fabs(df);
        worst = std::max(worst, rel);
        detail += std::string(name) + " " + fmt2(rad2deg(df)) + "deg rel " +
                  std::to_string(rel) + "; ";
    }
    return {worst < 0.01, detail};
}

// ---------------------------------------------------------------------------
// 3. interception test vs a brute-force vector recomputation
// ---------------------------------------------------------------------------

CheckResult check_interception_oracle() {
    const EngagementConfig ecfg;
    auto rng = make_stream(2025, "acc.intercept");
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    auto random_state = [&](double cx, double cy, double cz, double spread) {
        UavState s;
        s.x = cx + (u01(rng) * 2.0 - 1.0) * spread;
        s.y = cy + (u01(rng) * 2.0 - 1.0) * spread;
        s.z = cz + (u01(rng) * 2.0 - 1.0) * std::min(spread, 5000.0);
        s.v = 50.0 + u01(rng) * 350.0;
        s.gamma = (u01(rng) * 2.0 - 1.0) * deg2rad(80.0);
        s.psi = (u01(rng) * 2.0 - 1.0) * kPi;
        return s;
    };

    int mismatches = 0;
    double worst_angle = 0.0;
    for (int trial = 0; trial < 100000; ++trial) {
        const bool near = trial % 2 == 0;
        const UavState own = random_state(0.0, 0.0, 7000.0, 10000.0);
        const UavState tgt = near ? random_state(own.x, own.y, own.z, 900.0)
                                  : random_state(0.0, 0.0, 7000.0, 10000.0);
        const double px = tgt.x - own.x, py = tgt.y - own.y, pz = tgt.z - own.z;
        const double d = std::sqrt(px * px + py * py + pz * pz);
        if (d < 1e-6) continue;
        auto dir = [](const UavState& s) {
            return std::array<double, 3>{std::cos(s.gamma) * std::sin(s.psi),
                                         std::cos(s.gamma) * std::cos(s.psi),
                                         std::sin(s.gamma)};
        };
        const auto vu = dir(own);
        const auto vt = dir(tgt);
        const double au =
            std::acos(std::clamp((vu[0] * px + vu[1] * py + vu[2] * pz) / d, -1.0, 1.0));
        const double at =
            std::acos(std::clamp((vt[0] * px + vt[1] * py + vt[2] * pz) / d, -1.0, 1.0));
        const bool expect = au < ecfg.intercept_atu_max && at < ecfg.intercept_att_max &&
                            d < ecfg.intercept_d_max;
        const RelativeSituation rel = relative_situation(own, tgt);
        if (is_intercepted(rel, ecfg) != expect) ++mismatches;
        worst_angle = std::max({worst_angle, std::fabs(rel.alpha_u - au),
                                std::fabs(rel.alpha_t - at), std::fabs(rel.d - d)});
    }

    // threshold boundaries: the range cut is exactly representable, the angle
    // cuts are probed tightly from both sides
    auto level = [](double x, double y, double psi) {
        UavState s;
        s.x = x;
        s.y = y;
        s.z = 7000.0;
        s.v = 200.0;
        s.psi = psi;
        return s;
    };
    int boundary_bad = 0;
    {
        const UavState own = level(0.0, 0.0, 0.0);
        if (is_intercepted(relative_situation(own, level(0.0, 800.0, 0.0)), ecfg))
            ++boundary_bad;  // d == 800 exactly must not count
        if (!is_intercepted(relative_situation(own, level(0.0, 799.9, 0.0)), ecfg))
            ++boundary_bad;
        for (double off : {1e-6, -1e-6}) {
            const double a = ecfg.intercept_atu_max + off;
            UavState o = level(0.0, 0.0, 0.0);
            o.psi = a;  // own velocity rotated off the line of sight
            const bool hit = is_intercepted(relative_situation(o, level(0.0, 500.0, 0.0)), ecfg);
            if (hit != (off < 0.0)) ++boundary_bad;

            const double b = ecfg.intercept_att_max + off;
            const bool hit_t =
                is_intercepted(relative_situation(level(0.0, 0.0, 0.0), level(0.0, 500.0, b)),
                               ecfg);
            if (hit_t != (off < 0.0)) ++boundary_bad;
        }
    }

    const bool pass = mismatches == 0 && boundary_bad == 0 && worst_angle < 1e-9;
    return {pass, "mismatches=" + std::to_string(mismatches) +
                      " boundary_bad=" + std::to_string(boundary_bad) +
                      " worst_dev=" + std::to_string(worst_angle)};
}

// ---------------------------------------------------------------------------
// 4. dense reward formulas vs independent oracles, plus peak locations
// ---------------------------------------------------------------------------

CheckResult check_reward_fidelity() {
    const RewardConfig cfg;
    auto rng = make_stream(404, "acc.rewards");
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        RelativeSituation rel;
        rel.alpha_u = u01(rng) * kPi;
        rel.alpha_t = u01(rng) * kPi;
        rel.d = 1.0 + u01(rng) * 19999.0;
        rel.gamma_p = (u01(rng) - 0.5) * kPi;
        rel.psi_p = (u01(rng) * 2.0 - 1.0) * kPi;
        UavState own;
        own.z = 7000.0;
        own.v = 50.0 + u01(rng) * 350.0;

        const double pr_oracle =
            cfg.w1 * (1.0 - (rel.alpha_u + rel.alpha_t) / (2.0 * kPi)) +
            cfg.w2 * std::exp(-std::fabs(rel.d - cfg.d_opt_pursuit) / cfg.d0) +
            cfg.w3 * own.v * std::cos(rel.alpha_u) / cfg.v_max;
        const double br_oracle =
            cfg.bait_w1 * (2.0 * std::exp(-std::fabs(rel.alpha_t - cfg.alpha_opt) / cfg.alpha0) -
                           1.0) +
            cfg.bait_w2 * std::exp(-std::fabs(rel.d - cfg.d_opt_bait) / cfg.d0);

        worst = std::max(worst, std::fabs(pursuit_dense_reward(rel, own, cfg) - pr_oracle));
        worst = std::max(worst, std::fabs(bait_dense_reward(rel, cfg) - br_oracle));
    }

    // peak locations on a 1 m grid
    int peak_p = 0, peak_b = 0;
    double best_p = -1.0, best_b = -1.0;
    for (int d = 1; d <= 3000; ++d) {
        const double rp = distance_reward(d, cfg.d_opt_pursuit, cfg.d0);
        const double rb = distance_reward(d, cfg.d_opt_bait, cfg.d0);
        if (rp > best_p) { best_p = rp; peak_p = d; }
        if (rb > best_b) { best_b = rb; peak_b = d; }
    }
    RelativeSituation head_on;
    head_on.alpha_t = cfg.alpha_opt;
    const bool peaks_ok = peak_p == 800 && peak_b == 1500 && best_p == 1.0 && best_b == 1.0 &&
                          std::fabs(bait_angle_reward(head_on, cfg) - 1.0) < 1e-12;

    return {worst < 1e-12 && peaks_ok,
            "worst_dev=" + std::to_string(worst) + " d_peaks=" + std::to_string(peak_p) + "/" +
                std::to_string(peak_b)};
}

// ---------------------------------------------------------------------------
// 5. backprop vs central finite differences on every parameter
// ---------------------------------------------------------------------------

CheckResult check_gradients() {
    const double fd_eps = 1e-5;
    const std::vector<int> sizes = {kObsDim, 4, ManeuverCatalog::kActionCount};  // 135 params

    for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
        auto rng = make_stream(3000 + attempt, "acc.grad");
        QNetwork net = make_network(sizes);
        init_uniform_fanin(net, rng);
        QNetwork tgt = make_network(sizes);
        init_uniform_fanin(tgt, rng);

        std::uniform_real_distribution<double> u01(0.0, 1.0);
        std::uniform_int_distribution<int> ua(0, ManeuverCatalog::kActionCount - 1);
        std::vector<Transition> batch(16);
        std::vector<double> weights(batch.size());
        for (std::size_t i = 0; i < batch.size(); ++i) {
            for (double& x : batch[i].s) x = u01(rng) * 2.0 - 1.0;
            for (double& x : batch[i].s_next) x = u01(rng) * 2.0 - 1.0;
            batch[i].a = ua(rng);
            batch[i].r = u01(rng) * 2.0 - 1.0;
            batch[i].done = i % 4 == 0;
            weights[i] = 0.5 + 0.5 * u01(rng);
        }

        // the loss is piecewise smooth; step to a draw where no rectifier
        // input sits inside the finite-difference window
        bool clean = true;
        ForwardCache cache;
        for (const auto& t : batch) {
            forward_cached(net, t.s, cache);
            for (const auto& layer : cache.pre)
                for (double p : layer)
                    if (std::fabs(p) < 1e-3) clean = false;
        }
        if (!clean) continue;

        const std::vector<double> targets = compute_targets(net, tgt, batch, 0.95);
        const Gradients grads = batch_gradients(net, batch, targets, weights);

        double worst_rel = 0.0;
        for (std::size_t p = 0; p < param_count(net); ++p) {
            const double orig = get_param(net, p);
            set_param(net, p, orig + fd_eps);
            const double lp = batch_loss(net, batch, targets, weights);
            set_param(net, p, orig - fd_eps);
            const double lm = batch_loss(net, batch, targets, weights);
            set_param(net, p, orig);
            const double fd = (lp - lm) / (2.0 * fd_eps);
            const double an = get_gradient(grads, p);
            const double denom = std::max({std::fabs(fd), std::fabs(an), 1e-8});
            worst_rel = std::max(worst_rel, std::fabs(fd - an) / denom);
        }
        return {worst_rel < 1e-4, std::to_string(param_count(net)) + " params, worst rel err " +
                                      std::to_string(worst_rel)};
    }
    return {false, "no kink-free parameter draw found"};
}

// ---------------------------------------------------------------------------
// 6. replay sampling statistics and sum-tree root integrity
// ---------------------------------------------------------------------------

CheckResult check_replay_statistics() {
    // stratified frequencies on known priorities 1..4
    PerConfig per;
    per.capacity = 4;
    per.a_per = 1.0;
    ReplayBuffer buf(per, 77);
    for (int k = 1; k <= 4; ++k) {
        Transition t;
        t.a = k - 1;
        buf.insert(t, static_cast<double>(k) - per.epsilon_per);
    }
    std::vector<long long> counts(4, 0);
    for (int round = 0; round < 25000; ++round) {
        const SampleBatch b = buf.sample(4);
        for (const auto& item : b.items) ++counts[item.a];
    }
    double worst_freq = 0.0;
    for (int k = 0; k < 4; ++k) {
        const double f = static_cast<double>(counts[k]) / 100000.0;
        worst_freq = std::max(worst_freq, std::fabs(f - 0.1 * (k + 1)));
    }

    // raw tree: the root must equal the linear-scan sum after random churn
    auto rng = make_stream(78, "acc.tree");
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    SumTree tree(1000);
    std::vector<double> mirror(1000, 0.0);
    for (int op = 0; op < 10000; ++op) {
        const std::size_t leaf = static_cast<std::size_t>(u01(rng) * 1000.0) % 1000;
        const double p = u01(rng) < 0.1 ? 0.0 : std::exp(6.0 * u01(rng));
        tree.set(leaf, p);
        mirror[leaf] = p;
    }
    double scan = 0.0;
    for (double p : mirror) scan += p;
    const double tree_dev = std::fabs(tree.total() - scan) / std::max(1.0, scan);

    // buffer-level churn with immediate priority refreshes
    PerConfig churn_cfg;
    churn_cfg.capacity = 256;
    churn_cfg.a_per = 1.0;
    ReplayBuffer churn(churn_cfg, 79);
    std::vector<double> bmirror(256, 0.0);
    double max_abs = 1.0;
    std::size_t cursor = 0, size = 0;
    for (int op = 0; op < 10000; ++op) {
        if (size < 4 || u01(rng) < 0.5) {
            Transition t;
            churn.insert(t);
            bmirror[cursor] = max_abs + churn_cfg.epsilon_per;
            cursor = (cursor + 1) % 256;
            size = std::min<std::size_t>(size + 1, 256);
        } else {
            const SampleBatch b = churn.sample(4);
            std::vector<double> tds(4);
            for (double& td : tds) td = u01(rng) * 8.0;
            churn.update_priorities(b.refs, tds);
            for (std::size_t i = 0; i < 4; ++i) {
                bmirror[b.refs[i].leaf] = tds[i] + churn_cfg.epsilon_per;
                max_abs = std::max(max_abs, tds[i]);
            }
        }
    }
    double bscan = 0.0;
    for (std::size_t i = 0; i < size; ++i) bscan += bmirror[i];
    const double churn_dev = std::fabs(churn.stats().root_sum - bscan) / std::max(1.0, bscan);

    const bool pass = worst_freq < 0.01 && tree_dev < 1e-9 && churn_dev < 1e-9;
    return {pass, "worst_freq_dev=" + std::to_string(worst_freq) +
                      " tree_dev=" + std::to_string(tree_dev) +
                      " churn_dev=" + std::to_string(churn_dev)};
}

// ---------------------------------------------------------------------------
// 7. maximin choice vs exhaustive row-minimum search
// ---------------------------------------------------------------------------

CheckResult check_maximin_oracle() {
    auto rng = make_stream(505, "acc.maximin");
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_int_distribution<int> udim(2, 15);
    std::uniform_int_distribution<int> ucoarse(-2, 2);
    int bad = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n_opp = 1 + trial % 3;
        const int b = udim(rng), r = udim(rng);
        const bool coarse = trial % 4 == 0;  // integer grids force ties
        std::vector<PayoffMatrix> ms;
        for (int m = 0; m < n_opp; ++m) {
            PayoffMatrix pm(b, r);
            for (int i = 0; i < b; ++i)
                for (int j = 0; j < r; ++j)
                    pm.at(i, j) = coarse ? static_cast<double>(ucoarse(rng))
                                         : u01(rng) * 10.0 - 5.0;
            ms.push_back(pm);
        }
        int best = 0;
        double best_score = -1e300;
        for (int i = 0; i < b; ++i) {
            double score = 0.0;
            for (const auto& m : ms) {
                double row_min = 1e300;
                for (int j = 0; j < r; ++j) row_min = std::min(row_min, m.at(i, j));
                score += row_min;
            }
            if (score > best_score) {
                best_score = score;
                best = i;
            }
        }
        if (maximin_action(ms) != best) ++bad;
    }
    return {bad == 0, std::to_string(bad) + " of 1000 disagreements"};
}

// ---------------------------------------------------------------------------
// 8. a few hundred optimizer steps collapse the loss on a frozen batch
// ---------------------------------------------------------------------------

CheckResult check_learner_collapse() {
    auto rng = make_stream(606, "acc.learner");
    QNetwork net = make_network({kObsDim, 16, ManeuverCatalog::kActionCount});
    init_uniform_fanin(net, rng);
    const QNetwork tgt = net;
    OptimizerState opt = make_optimizer(net, 1e-2);

    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_int_distribution<int> ua(0, ManeuverCatalog::kActionCount - 1);
    std::vector<Transition> batch(32);
    for (auto& t : batch) {
        for (double& x : t.s) x = u01(rng) * 2.0 - 1.0;
        t.a = ua(rng);
        t.r = u01(rng) * 4.0 - 2.0;
        t.done = true;  // fixed regression targets
    }
    const std::vector<double> weights(batch.size(), 1.0);

    const double loss0 = batch_loss(net, batch, compute_targets(net, tgt, batch, 0.95), weights);
    for (int i = 0; i < 200; ++i) train_step(net, tgt, opt, batch, weights, 0.95);
    const double loss1 = batch_loss(net, batch, compute_targets(net, tgt, batch, 0.95), weights);
    return {loss1 < 0.1 * loss0,
            "loss " + std::to_string(loss0) + " -> " + std::to_string(loss1)};
}

// ---------------------------------------------------------------------------
// 9. the matrix-game opponent runs down a straight-flying target
// ---------------------------------------------------------------------------

CheckResult check_matrix_opponent(double& win_rate_out) {
    RunConfig cfg;
    cfg.scenario.blue_policy = BluePolicyKind::maximin;
    cfg.scenario.time_limit_s = 180.0;
    Arena arena(cfg.physics, cfg.engagement, cfg.rewards, cfg.scenario);
    const int hold = ManeuverCatalog::standard().index_of("hold_straight");
    const RedPolicyFn straight = [hold](int, Role, const Observation&, int) { return hold; };

    int caught = 0;
    for (int k = 0; k < 100; ++k) {
        const EpisodeRecord rec =
            arena.run_episode(straight, derive_seed(4242, "eval.episode", k), false);
        if (rec.outcome == Outcome::lose) {
            for (const auto& ev : rec.events)
                if (ev.kind == "interception" && !ev.subject.empty() && ev.subject[0] == 'b') {
                    ++caught;
                    break;
                }
        }
    }
    win_rate_out = caught;
    return {caught >= 90, std::to_string(caught) + "/100 interceptions"};
}

// ---------------------------------------------------------------------------
// desk-scale training configuration shared by the learning checks
// ---------------------------------------------------------------------------

RunConfig desk_config(const std::string& out_dir) {
    RunConfig cfg;
    cfg.seed = 7;
    cfg.output_dir = out_dir;
    cfg.network.hidden = {64, 64};
    cfg.network.batch_size = 256;
    cfg.network.lr = 1e-3;
    cfg.network.target_sync_period = 500;
    cfg.trainer.warmup_min = 1000;
    cfg.trainer.deterministic = true;
    cfg.scenario.time_limit_s = 60.0;  // shorter training episodes, more of them
    return cfg;
}

// ---------------------------------------------------------------------------
// 10. pursuit training vs the straight-line target
// ---------------------------------------------------------------------------

CheckResult check_pursuit_training(SharedArtifacts& shared) {
    RunConfig cfg = desk_config("acc_run_pursuit");
    std::filesystem::remove_all(cfg.output_dir);
    const TrainArtifacts art = cmd_train(cfg, "straight-pursuit", 50000);
    shared.pursuit_ckpt = art.final_checkpoints.at(0);

    RolePolicies pol;
    pol.pursuit = load_checkpoint(shared.pursuit_ckpt);
    EvalOptions opt;
    opt.episodes = 100;
    opt.limits_s = {180.0};
    const EvalReport rep = run_evaluation(cfg, pol, opt);
    const int wins = rep.rows[0].win;

    const std::vector<double> rewards = metrics_episode_rewards(art.metrics_path);
    if (rewards.size() < 20)
        return {false, "only " + std::to_string(rewards.size()) + " training episodes"};
    const std::vector<double> ma = moving_average_100(rewards);
    const std::size_t dec = ma.size() / 10;
    const double first = mean_of(ma, 0, dec);
    const double last = mean_of(ma, ma.size() - dec, ma.size());

    const bool pass = wins >= 70 && last > first;
    return {pass, std::to_string(wins) + "/100 wins after " + std::to_string(rewards.size()) +
                      " episodes; smoothed reward " + fmt2(first) + " -> " + fmt2(last)};
}

// ---------------------------------------------------------------------------
// 11. bait training vs the circling target
// ---------------------------------------------------------------------------

CheckResult check_bait_training(SharedArtifacts& shared) {
    RunConfig cfg = desk_config("acc_run_bait");
    std::filesystem::remove_all(cfg.output_dir);
    const TrainArtifacts art = cmd_train(cfg, "circle-bait", 50000);
    shared.bait_ckpt = art.final_checkpoints.at(0);

    const std::vector<double> rewards = metrics_episode_rewards(art.metrics_path);
    if (rewards.size() < 20)
        return {false, "only " + std::to_string(rewards.size()) + " training episodes"};
    const std::vector<double> ma = moving_average_100(rewards);
    const std::size_t dec = ma.size() / 10;
    const double first = mean_of(ma, 0, dec);
    const double last = mean_of(ma, ma.size() - dec, ma.size());
    const double range =
        *std::max_element(ma.begin(), ma.end()) - *std::min_element(ma.begin(), ma.end());

    const bool pass = (last - first) >= 0.5 * range;
    return {pass, "smoothed reward " + fmt2(first) + " -> " + fmt2(last) + ", range " +
                      fmt2(range)};
}

// ---------------------------------------------------------------------------
// 12. cooperative two-on-one evaluation with the trained checkpoint
// ---------------------------------------------------------------------------

CheckResult check_cooperative_eval(const SharedArtifacts& shared) {
    if (shared.pursuit_ckpt.empty()) return {false, "no pursuit checkpoint from training"};
    RunConfig cfg;
    cfg.seed = 7;
    apply_scenario_kind(cfg.scenario, "2v1");

    RolePolicies pol;
    pol.pursuit = load_checkpoint(shared.pursuit_ckpt);
    EvalOptions opt;
    opt.episodes = 100;
    opt.limits_s = {60.0, 180.0, 300.0};
    const EvalReport rep = run_evaluation(cfg, pol, opt);

    std::string detail;
    int worst_lose = 0;
    bool monotone = true;
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        const auto& r = rep.rows[i];
        worst_lose = std::max(worst_lose, r.lose);
        if (i > 0 && r.win < rep.rows[i - 1].win) monotone = false;
        detail += std::to_string(static_cast<int>(r.limit_s)) + "s w/s/l " +
                  std::to_string(r.win) + "/" + std::to_string(r.standoff) + "/" +
                  std::to_string(r.lose) + "; ";
    }
    const bool pass = worst_lose <= 5 && monotone;
    return {pass, detail + (monotone ? "wins monotone" : "wins NOT monotone")};
}

// ---------------------------------------------------------------------------
// 13. single-worker deterministic runs are byte-identical
// ---------------------------------------------------------------------------

CheckResult check_determinism() {
    RunConfig cfg;
    cfg.seed = 11;
    cfg.output_dir = "acc_det_run";
    cfg.network.hidden = {16};
    cfg.network.batch_size = 64;
    cfg.per.capacity = 8192;
    cfg.trainer.workers = 1;
    cfg.trainer.epsilon_ladder = {0.2};
    cfg.trainer.warmup_min = 256;
    cfg.trainer.deterministic = true;
    cfg.scenario.time_limit_s = 20.0;

    auto run_once = [&]() {
        std::filesystem::remove_all(cfg.output_dir);
        std::filesystem::remove_all("acc_det_export");
        const TrainArtifacts art = cmd_train(cfg, "straight-pursuit", 3000);
        RolePolicies pol;
        pol.pursuit = load_checkpoint(art.final_checkpoints.at(0));
        cmd_export(cfg, pol, derive_seed(cfg.seed, "eval.episode", 0), "acc_det_export", "csv");
        std::map<std::string, std::string> bytes;
        bytes["metrics"] = slurp(art.metrics_path);
        bytes["final"] = slurp(art.final_checkpoints.at(0));
        bytes["phase"] = slurp(art.result.checkpoint_paths.at(0));
        bytes["trajectory"] = slurp("acc_det_export/trajectory.csv");
        bytes["events"] = slurp("acc_det_export/events.csv");
        return bytes;
    };

    const auto a = run_once();
    const auto b = run_once();
    std::filesystem::remove_all(cfg.output_dir);
    std::filesystem::remove_all("acc_det_export");

    std::string diffs;
    for (const auto& [name, content] : a)
        if (b.at(name) != content) diffs += name + " ";
    return {diffs.empty(), diffs.empty() ? "metrics, checkpoints and exports identical"
                                         : "differs: " + diffs};
}

// ---------------------------------------------------------------------------
// 14. the reduced configuration logs itself as the uniform baseline
// ---------------------------------------------------------------------------

CheckResult check_baseline_logging() {
    auto header_of = [](const RunConfig& cfg, const std::string& plan) {
        const TrainArtifacts art = cmd_train(cfg, plan, 200);
        std::ifstream is(art.metrics_path);
        std::string l1, l2;
        std::getline(is, l1);
        std::getline(is, l2);
        std::filesystem::remove_all(cfg.output_dir);
        return std::make_pair(l1, l2);
    };

    RunConfig base;
    base.seed = 3;
    base.output_dir = "acc_baseline_run";
    base.network.hidden = {8};
    base.scenario.time_limit_s = 10.0;
    base.trainer.deterministic = true;

    RunConfig reduced = base;
    reduced.trainer.workers = 1;
    reduced.trainer.epsilon_ladder = {0.1};
    reduced.per.a_per = 0.0;
    const auto [r1, r2] = header_of(reduced, "straight-pursuit");
    const bool reduced_ok =
        r1 == "# config_hash=" + config_hash(reduced) && r2 == "# variant=ddqn_uniform";

    base.output_dir = "acc_full_run";
    const auto [f1, f2] = header_of(base, "straight-pursuit");
    const bool full_ok =
        f1 == "# config_hash=" + config_hash(base) && f2 == "# variant=meaddqn_per";

    return {reduced_ok && full_ok,
            "reduced: " + r2.substr(2) + ", full: " + f2.substr(2)};
}

}  // namespace

int main() {
    SharedArtifacts shared;
    double ignored = 0.0;

    struct Check {
        std::string name;
        double time_limit_s;  // 0 = no stated bound
        std::function<CheckResult()> run;
    };
    const std::vector<Check> checks = {
        {"trim-hold-stability", 1.0, check_trim_hold},
        {"turn-rate-fidelity", 10.0, check_turn_rate},
        {"interception-oracle", 5.0, check_interception_oracle},
        {"reward-formula-fidelity", 0.0, check_reward_fidelity},
        {"gradient-check", 30.0, check_gradients},
        {"replay-sampling-statistics", 0.0, check_replay_statistics},
        {"maximin-oracle", 5.0, check_maximin_oracle},
        {"learner-loss-collapse", 0.0, check_learner_collapse},
        {"matrix-opponent-competence", 600.0,
         [&] { return check_matrix_opponent(ignored); }},
        {"pursuit-desk-training", 1800.0, [&] { return check_pursuit_training(shared); }},
        {"bait-desk-training", 0.0, [&] { return check_bait_training(shared); }},
        {"cooperative-evaluation", 1800.0, [&] { return check_cooperative_eval(shared); }},
        {"deterministic-reproducibility", 0.0, check_determinism},
        {"baseline-reduction-logging", 0.0, check_baseline_logging},
    };

    bool all_pass = true;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        CheckResult res;
        try {
            res = checks[i].run();
        } catch (const std::exception& e) {
            res = {false, std::string("exception: ") + e.what()};
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool pass = res.pass;
        std::string detail = res.detail;
        if (checks[i].time_limit_s > 0.0 && elapsed > checks[i].time_limit_s) {
            pass = false;
            detail += " [over time budget " + fmt2(checks[i].time_limit_s) + "s]";
        }
        all_pass = all_pass && pass;
        std::ostringstream line;
        line << (pass ? "PASS" : "FAIL") << "  " << std::setw(2) << std::setfill('0') << (i + 1)
             << " " << checks[i].name << "  (" << fmt2(elapsed) << "s)  " << detail;
        std::cout << line.str() << std::endl;
    }
    std::cout << (all_pass ? "ACCEPTANCE: all checks passed"
                           : "ACCEPTANCE: at least one check failed")
              << std::endl;
    return all_pass ? 0 : 1;
}
