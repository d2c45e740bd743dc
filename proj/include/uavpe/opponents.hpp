// Non-learning blue-side deciders: the matrix-game maximin policy built on
// one-step lookahead payoffs, and the scripted basic-training maneuvers.
#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "uavpe/flight_dynamics.hpp"
#include "uavpe/rewards.hpp"
#include "uavpe/rng.hpp"

namespace uavpe {

/// b x r payoff grid: rows are blue actions, columns red actions.
struct PayoffMatrix {
    int blue_actions = 0;
    int red_actions = 0;
    std::vector<double> v;

    PayoffMatrix() = default;
    PayoffMatrix(int b, int r) : blue_actions(b), red_actions(r), v(static_cast<std::size_t>(b) * r, 0.0) {}

    double& at(int i, int j) { return v[static_cast<std::size_t>(i) * red_actions + j]; }
    double at(int i, int j) const { return v[static_cast<std::size_t>(i) * red_actions + j]; }
};

/// Decision steps over which a payoff entry's terminal outcome is projected.
/// Two seconds covers the swerve-or-die window at the worst head-on closure
/// rate, where one decision step of warning is far too late to matter.
inline constexpr int kPayoffTerminalHorizon = 60;

/// Payoff of blue action i against red action j. Both UAVs are forward
/// simulated under the constant action pair; the first terminal event inside
/// the projection horizon decides the entry, checked each step in the
/// engagement's own precedence order: leaving the altitude envelope or
/// colliding scores the punishment, capturing the target scores +r_final, and
/// flying into the target's interception cone scores -r_final. An entry with
/// no terminal event scores the dense pursuit reward of the situation one
/// decision step ahead.
inline PayoffMatrix build_payoff(const UavState& blue, const UavState& red,
                                 const ManeuverCatalog& catalog, const PhysicsConfig& physics,
                                 const RewardConfig& rewards,
                                 const EngagementConfig& engagement = {},
                                 int horizon = kPayoffTerminalHorizon) {
    if (horizon < 1) throw std::invalid_argument("build_payoff: horizon must be >= 1");
    const int n = static_cast<int>(catalog.entries.size());
    PayoffMatrix m(n, n);
    std::vector<std::vector<UavState>> blue_traj(n), red_traj(n);
    for (int a = 0; a < n; ++a) {
        blue_traj[a].reserve(horizon);
        red_traj[a].reserve(horizon);
        UavState b = blue, r = red;
        for (int k = 0; k < horizon; ++k) {
            b = step(b, resolve_action(a, b, catalog, physics), physics);
            r = step(r, resolve_action(a, r, catalog, physics), physics);
            blue_traj[a].push_back(b);
            red_traj[a].push_back(r);
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double score = 0.0;
            bool terminal = false;
            for (int k = 0; k < horizon && !terminal; ++k) {
                const UavState& b = blue_traj[i][k];
                const UavState& r = red_traj[j][k];
                terminal = true;
                if (b.z < engagement.z_floor || b.z > engagement.z_ceiling) {
                    score = rewards.r_punish;
                    continue;
                }
                const RelativeSituation to_red = relative_situation(b, r);
                if (to_red.d < engagement.collision_radius)
                    score = rewards.r_punish;
                else if (is_intercepted(to_red, engagement))
                    score = rewards.r_final;
                else if (is_intercepted(relative_situation(r, b), engagement))
                    score = -rewards.r_final;
                else
                    terminal = false;
            }
            if (!terminal) {
                const RelativeSituation one_step =
                    relative_situation(blue_traj[i][0], red_traj[j][0]);
                score = pursuit_dense_reward(one_step, blue_traj[i][0], rewards);
            }
            m.at(i, j) = score;
        }
    }
    return m;
}

/// Maximin over summed per-opponent matrices: score each blue action by the
/// sum of its row minima, return the best-scoring action (lowest index wins
/// ties).
inline int maximin_action(const std::vector<PayoffMatrix>& matrices) {
    if (matrices.empty()) throw std::invalid_argument("maximin: no payoff matrices");
    const int b = matrices.front().blue_actions;
    for (const auto& m : matrices)
        if (m.blue_actions != b)
            throw std::invalid_argument("maximin: inconsistent blue action counts");
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < b; ++i) {
        double score = 0.0;
        for (const auto& m : matrices) {
            double row_min = std::numeric_limits<double>::infinity();
            for (int j = 0; j < m.red_actions; ++j) row_min = std::min(row_min, m.at(i, j));
            score += row_min;
        }
        if (score > best_score) {
            best_score = score;
            best = i;
        }
    }
    return best;
}

/// The three scripted basic-training maneuvers. The random variant holds each
/// drawn action for hold_steps decision steps; its draws are a pure function
/// of (seed, step) so replays are reproducible without carried state.
struct ScriptedPolicy {
    enum class Variant { straight, circling, random };

    Variant variant = Variant::straight;
    int straight_action = 5;   // level trim hold
    int turn_action = 6;       // sustained level turn
    int hold_steps = 10;
    std::uint64_t seed = 0;
    int action_count = ManeuverCatalog::kActionCount;
};

inline int scripted_action(const ScriptedPolicy& policy, int step) {
    if (step < 0) throw std::invalid_argument("scripted_action: negative step");
    switch (policy.variant) {
        case ScriptedPolicy::Variant::straight:
            return policy.straight_action;
        case ScriptedPolicy::Variant::circling:
            return policy.turn_action;
        case ScriptedPolicy::Variant::random: {
            if (policy.hold_steps < 1)
                throw std::invalid_argument("scripted_action: hold_steps must be >= 1");
            std::mt19937_64 rng(derive_seed(policy.seed, "scripted.random",
                                            static_cast<std::uint64_t>(step / policy.hold_steps)));
            std::uniform_int_distribution<int> u(0, policy.action_count - 1);
            return u(rng);
        }
    }
    throw std::logic_error("scripted_action: unknown variant");
}

}  // namespace uavpe
