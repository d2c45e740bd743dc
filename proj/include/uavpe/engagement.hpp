// Pairwise engagement geometry: relative situation angles, the 13-component
// normalized observation vector, the interception judgment, and the
// boundary/collision termination tests.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "uavpe/flight_dynamics.hpp"
#include "uavpe/geom.hpp"

namespace uavpe {

/// Geometry of one ordered (own, target) pair. P is the line-of-sight vector
/// from own toward target; alpha_u is measured at the own ship between its
/// velocity and P, alpha_t at the target between its velocity and P.
struct RelativeSituation {
    double alpha_u = 0.0;  // rad, [0, pi]
    double alpha_t = 0.0;  // rad, [0, pi]
    double d = 0.0;        // m
    double gamma_p = 0.0;  // rad, pitch of P
    double psi_p = 0.0;    // rad, yaw of P
};

struct EngagementConfig {
    double intercept_atu_max = deg2rad(5.0);   // own-ship pointing cone
    double intercept_att_max = deg2rad(90.0);  // target aspect limit
    double intercept_d_max = 800.0;            // m
    double z_floor = 1000.0;                   // m
    double z_ceiling = 13000.0;                // m
    double collision_radius = 50.0;            // m

    void validate() const {
        if (!(intercept_atu_max > 0.0 && intercept_att_max > 0.0 && intercept_d_max > 0.0))
            throw std::invalid_argument("engagement: interception thresholds must be positive");
        if (!(collision_radius > 0.0))
            throw std::invalid_argument("engagement: collision_radius must be positive");
        if (!(z_floor < z_ceiling))
            throw std::invalid_argument("engagement: z_floor must be < z_ceiling");
    }
};

inline RelativeSituation relative_situation(const UavState& own, const UavState& target) {
    const Vec3 p = position(target) - position(own);
    const double d = norm(p);
    if (d == 0.0) throw std::domain_error("relative_situation: coincident positions");
    RelativeSituation rel;
    rel.d = d;
    rel.alpha_u = angle_between(velocity_direction(own), p);
    rel.alpha_t = angle_between(velocity_direction(target), p);
    rel.gamma_p = std::asin(std::clamp(p.z / d, -1.0, 1.0));
    rel.psi_p = std::atan2(p.x, p.y);
    return rel;
}

/// Tail-chase interception test; all three thresholds are strict.
inline bool is_intercepted(const RelativeSituation& rel, const EngagementConfig& cfg) {
    return rel.alpha_u < cfg.intercept_atu_max && rel.alpha_t < cfg.intercept_att_max &&
           rel.d < cfg.intercept_d_max;
}

inline bool out_of_bounds(const UavState& s, const EngagementConfig& cfg) {
    return s.z <= cfg.z_floor || s.z >= cfg.z_ceiling;
}

inline bool collided(const UavState& a, const UavState& b, const EngagementConfig& cfg) {
    return norm(position(b) - position(a)) < cfg.collision_radius;
}

// ---------------------------------------------------------------------------
// Observation vector
// ---------------------------------------------------------------------------

constexpr int kObsDim = 13;
using Observation = std::array<double, kObsDim>;

/// Component order of the observation vector.
enum ObsIndex {
    kObsZU = 0,
    kObsVU,
    kObsGammaU,
    kObsPsiU,
    kObsZT,
    kObsVT,
    kObsGammaT,
    kObsPsiT,
    kObsAlphaU,
    kObsAlphaT,
    kObsD,
    kObsGammaP,
    kObsPsiP,
};

/// Fixed affine scaling of each observation channel. Altitudes and speeds map
/// their envelopes onto [-1, 1], angles divide by pi, distance is capped at
/// d_cap and mapped onto [0, 1].
struct ObsNormalizer {
    double z_lo = 1000.0;
    double z_hi = 13000.0;
    double v_lo = 50.0;
    double v_hi = 400.0;
    double d_cap = 20000.0;

    ObsNormalizer() = default;
    ObsNormalizer(const EngagementConfig& ecfg, const PhysicsConfig& pcfg)
        : z_lo(ecfg.z_floor), z_hi(ecfg.z_ceiling), v_lo(pcfg.v_min), v_hi(pcfg.v_max) {}

    double norm_z(double z) const { return 2.0 * (z - z_lo) / (z_hi - z_lo) - 1.0; }
    double norm_v(double v) const { return 2.0 * (v - v_lo) / (v_hi - v_lo) - 1.0; }
    double norm_angle(double a) const { return a / kPi; }
    double norm_d(double d) const { return std::min(d, d_cap) / d_cap; }

    double denorm_z(double u) const { return (u + 1.0) / 2.0 * (z_hi - z_lo) + z_lo; }
    double denorm_v(double u) const { return (u + 1.0) / 2.0 * (v_hi - v_lo) + v_lo; }
    double denorm_angle(double u) const { return u * kPi; }
    double denorm_d(double u) const { return u * d_cap; }
};

inline Observation observe(const UavState& own, const UavState& target,
                           const ObsNormalizer& nz) {
    const RelativeSituation rel = relative_situation(own, target);
    Observation o;
    o[kObsZU] = nz.norm_z(own.z);
    o[kObsVU] = nz.norm_v(own.v);
    o[kObsGammaU] = nz.norm_angle(own.gamma);
    o[kObsPsiU] = nz.norm_angle(own.psi);
    o[kObsZT] = nz.norm_z(target.z);
    o[kObsVT] = nz.norm_v(target.v);
    o[kObsGammaT] = nz.norm_angle(target.gamma);
    o[kObsPsiT] = nz.norm_angle(target.psi);
    o[kObsAlphaU] = nz.norm_angle(rel.alpha_u);
    o[kObsAlphaT] = nz.norm_angle(rel.alpha_t);
    o[kObsD] = nz.norm_d(rel.d);
    o[kObsGammaP] = nz.norm_angle(rel.gamma_p);
    o[kObsPsiP] = nz.norm_angle(rel.psi_p);
    return o;
}

/// Inverse of the per-channel scaling, returning the 13 raw values in the
/// same order. Exact except for the distance channel once d exceeds d_cap.
inline std::array<double, kObsDim> denormalize(const Observation& o, const ObsNormalizer& nz) {
    std::array<double, kObsDim> raw;
    raw[kObsZU] = nz.denorm_z(o[kObsZU]);
    raw[kObsVU] = nz.denorm_v(o[kObsVU]);
    raw[kObsGammaU] = nz.denorm_angle(o[kObsGammaU]);
    raw[kObsPsiU] = nz.denorm_angle(o[kObsPsiU]);
    raw[kObsZT] = nz.denorm_z(o[kObsZT]);
    raw[kObsVT] = nz.denorm_v(o[kObsVT]);
    raw[kObsGammaT] = nz.denorm_angle(o[kObsGammaT]);
    raw[kObsPsiT] = nz.denorm_angle(o[kObsPsiT]);
    raw[kObsAlphaU] = nz.denorm_angle(o[kObsAlphaU]);
    raw[kObsAlphaT] = nz.denorm_angle(o[kObsAlphaT]);
    raw[kObsD] = nz.denorm_d(o[kObsD]);
    raw[kObsGammaP] = nz.denorm_angle(o[kObsGammaP]);
    raw[kObsPsiP] = nz.denorm_angle(o[kObsPsiP]);
    return raw;
}

}  // namespace uavpe
