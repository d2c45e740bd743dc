// Shaped rewards for the two red-side roles plus the terminal and penalty
// branches shared by both.
//
// Pursuit reward blends three dense terms: angle advantage, closeness to an
// objective distance, and velocity projection toward the target. The bait
// reward instead pays for looking like an attractive target: the opponent's
// nose on the bait at a stand-off distance.
#pragma once

#include <cmath>
#include <stdexcept>

#include "uavpe/engagement.hpp"
#include "uavpe/flight_dynamics.hpp"
#include "uavpe/geom.hpp"

namespace uavpe {

struct RewardConfig {
    // pursuit dense weights
    double w1 = 0.4;
    double w2 = 0.3;
    double w3 = 0.3;
    // bait dense weights
    double bait_w1 = 0.5;
    double bait_w2 = 0.5;
    double d_opt_pursuit = 800.0;   // m
    double d_opt_bait = 1500.0;     // m
    double d0 = 500.0;              // m, distance reward scale
    double alpha_opt = kPi;         // rad, bait objective aspect angle
    double alpha0 = kPi / 3.0;      // rad, bait angle reward scale
    double r_final = 2.0;           // terminal interception reward
    double r_punish = -2.0;         // collision / out-of-bound penalty
    double v_max = 400.0;           // m/s, velocity reward normalizer

    void validate() const {
        if (std::abs(w1 + w2 + w3 - 1.0) > 1e-12)
            throw std::invalid_argument("rewards: pursuit weights must sum to 1");
        if (std::abs(bait_w1 + bait_w2 - 1.0) > 1e-12)
            throw std::invalid_argument("rewards: bait weights must sum to 1");
        if (!(d0 > 0.0)) throw std::invalid_argument("rewards: d0 must be positive");
        if (!(alpha0 > 0.0)) throw std::invalid_argument("rewards: alpha0 must be positive");
        if (!(r_final > 0.0 && r_punish < 0.0))
            throw std::invalid_argument("rewards: need r_final > 0 > r_punish");
        if (!(v_max > 0.0)) throw std::invalid_argument("rewards: v_max must be positive");
        if (!(d_opt_pursuit >= 0.0 && d_opt_bait >= 0.0))
            throw std::invalid_argument("rewards: objective distances must be non-negative");
    }
};

/// Terminal events of the owning UAV for the step being scored. The arena
/// guarantees at most one of the two groups (interception vs. penalty) fires
/// in a step.
struct OutcomeFlags {
    bool intercepted_target = false;
    bool was_intercepted = false;
    bool collided = false;
    bool out_of_bounds = false;
};

inline double pursuit_angle_reward(const RelativeSituation& rel) {
    return 1.0 - (rel.alpha_u + rel.alpha_t) / (2.0 * kPi);
}

inline double distance_reward(double d, double d_opt, double d0) {
    return std::exp(-std::abs(d - d_opt) / d0);
}

inline double velocity_reward(const UavState& own, const RelativeSituation& rel, double v_max) {
    if (rel.d == 0.0) throw std::domain_error("velocity_reward: degenerate zero-range geometry");
    return own.v * std::cos(rel.alpha_u) / v_max;
}

inline double bait_angle_reward(const RelativeSituation& rel, const RewardConfig& cfg) {
    return 2.0 * std::exp(-std::abs(rel.alpha_t - cfg.alpha_opt) / cfg.alpha0) - 1.0;
}

/// Dense pursuit blend only, with no terminal branches. Also the scoring
/// function of the matrix-game opponent and the exported reward trace.
inline double pursuit_dense_reward(const RelativeSituation& rel, const UavState& own,
                                   const RewardConfig& cfg) {
    return cfg.w1 * pursuit_angle_reward(rel) +
           cfg.w2 * distance_reward(rel.d, cfg.d_opt_pursuit, cfg.d0) +
           cfg.w3 * velocity_reward(own, rel, cfg.v_max);
}

inline double bait_dense_reward(const RelativeSituation& rel, const RewardConfig& cfg) {
    return cfg.bait_w1 * bait_angle_reward(rel, cfg) +
           cfg.bait_w2 * distance_reward(rel.d, cfg.d_opt_bait, cfg.d0);
}

namespace detail {
inline void check_flags(const OutcomeFlags& f) {
    const bool interception_branch = f.intercepted_target || f.was_intercepted;
    const bool penalty_branch = f.collided || f.out_of_bounds;
    if (interception_branch && penalty_branch)
        throw std::invalid_argument("reward flags: interception and penalty cannot co-occur");
}
}  // namespace detail

/// Full pursuit step reward. Terminal branches dominate the dense blend;
/// achieving interception outranks suffering one in the same step.
inline double pursuit_step_reward(const RelativeSituation& rel, const UavState& own,
                                  const OutcomeFlags& flags, const RewardConfig& cfg) {
    detail::check_flags(flags);
    if (flags.intercepted_target) return cfg.r_final;
    if (flags.was_intercepted) return -cfg.r_final;
    if (flags.collided || flags.out_of_bounds) return cfg.r_punish;
    return pursuit_dense_reward(rel, own, cfg);
}

/// Full bait step reward. The bait has no interception bonus: its terminal
/// branch is only being intercepted.
inline double bait_step_reward(const RelativeSituation& rel, const OutcomeFlags& flags,
                               const RewardConfig& cfg) {
    detail::check_flags(flags);
    if (flags.was_intercepted) return -cfg.r_final;
    if (flags.collided || flags.out_of_bounds) return cfg.r_punish;
    return bait_dense_reward(rel, cfg);
}

}  // namespace uavpe
