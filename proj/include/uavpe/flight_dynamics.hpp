// 3-DOF point-mass UAV dynamics and the 15-entry discrete maneuver catalog.
//
// State is [x, y, z, v, gamma, psi] in an inertial frame: gamma is the pitch
// of the velocity vector above the x-o-y plane, psi its yaw measured from the
// y-axis. Controls are [nx, nz, phi]: longitudinal overload, body vertical
// overload, and velocity-vector roll angle.
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "uavpe/geom.hpp"

namespace uavpe {

struct UavState {
    double x = 0.0;      // m
    double y = 0.0;      // m
    double z = 0.0;      // m
    double v = 0.0;      // m/s
    double gamma = 0.0;  // rad, pitch of velocity vector
    double psi = 0.0;    // rad, yaw of velocity vector, (-pi, pi]
};

struct ControlInput {
    double nx = 0.0;   // g-units, along velocity
    double nz = 0.0;   // g-units, body vertical axis
    double phi = 0.0;  // rad, velocity-vector roll
};

struct StateDerivative {
    double dx = 0.0;
    double dy = 0.0;
    double dz = 0.0;
    double dv = 0.0;
    double dgamma = 0.0;
    double dpsi = 0.0;
};

struct PhysicsConfig {
    double g = 9.81;          // m/s^2
    double dt = 0.05;         // RK4 integration step, s
    int substeps = 2;         // RK4 steps per decision step
    double v_min = 50.0;      // m/s
    double v_max = 400.0;     // m/s
    double gamma_max = deg2rad(80.0);  // keeps cos(gamma) away from 0
    double nx_min = -2.0;
    double nx_max = 2.0;
    double nz_min = -1.0;
    double nz_max = 6.0;

    double decision_interval() const { return dt * static_cast<double>(substeps); }

    void validate() const {
        if (!(g > 0.0)) throw std::invalid_argument("physics: g must be positive");
        if (!(dt > 0.0)) throw std::invalid_argument("physics: dt must be positive");
        if (substeps < 1) throw std::invalid_argument("physics: substeps must be >= 1");
        if (!(v_min < v_max)) throw std::invalid_argument("physics: v_min must be < v_max");
        if (!(v_min > 0.0)) throw std::invalid_argument("physics: v_min must be positive");
        if (!(gamma_max > 0.0 && gamma_max < kPi / 2.0))
            throw std::invalid_argument("physics: gamma_max must lie in (0, pi/2)");
        if (!(nx_min < nx_max) || !(nz_min < nz_max))
            throw std::invalid_argument("physics: malformed control envelope");
    }
};

inline bool is_finite(const UavState& s) {
    return std::isfinite(s.x) && std::isfinite(s.y) && std::isfinite(s.z) &&
           std::isfinite(s.v) && std::isfinite(s.gamma) && std::isfinite(s.psi);
}

inline bool is_finite(const ControlInput& c) {
    return std::isfinite(c.nx) && std::isfinite(c.nz) && std::isfinite(c.phi);
}

/// Unit direction of the velocity vector implied by (gamma, psi).
inline Vec3 velocity_direction(const UavState& s) {
    const double cg = std::cos(s.gamma);
    return {cg * std::sin(s.psi), cg * std::cos(s.psi), std::sin(s.gamma)};
}

inline Vec3 position(const UavState& s) { return {s.x, s.y, s.z}; }

/// State rates for the 3-DOF point-mass model:
///   dv     = g (nx - sin gamma)
///   dgamma = (g/v)(nz cos phi - cos gamma)
///   dpsi   = g nz sin phi / (v cos gamma)
///   dx/dy/dz from the velocity direction.
inline StateDerivative derivatives(const UavState& s, const ControlInput& c,
                                   const PhysicsConfig& cfg) {
    if (!is_finite(s) || !is_finite(c))
        throw std::domain_error("derivatives: non-finite state or control");
    const double cg = std::cos(s.gamma);
    StateDerivative d;
    d.dv = cfg.g * (c.nx - std::sin(s.gamma));
    d.dgamma = cfg.g / s.v * (c.nz * std::cos(c.phi) - cg);
    d.dpsi = cfg.g * c.nz * std::sin(c.phi) / (s.v * cg);
    d.dx = s.v * cg * std::sin(s.psi);
    d.dy = s.v * cg * std::cos(s.psi);
    d.dz = s.v * std::sin(s.gamma);
    return d;
}

namespace detail {

inline UavState advance(const UavState& s, const StateDerivative& d, double h) {
    UavState r = s;
    r.x += h * d.dx;
    r.y += h * d.dy;
    r.z += h * d.dz;
    r.v += h * d.dv;
    r.gamma += h * d.dgamma;
    r.psi += h * d.dpsi;
    return r;
}

inline UavState rk4_step(const UavState& s, const ControlInput& c, const PhysicsConfig& cfg,
                         double h) {
    const StateDerivative k1 = derivatives(s, c, cfg);
    const StateDerivative k2 = derivatives(advance(s, k1, h / 2.0), c, cfg);
    const StateDerivative k3 = derivatives(advance(s, k2, h / 2.0), c, cfg);
    const StateDerivative k4 = derivatives(advance(s, k3, h), c, cfg);
    UavState r = s;
    r.x += h / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
    r.y += h / 6.0 * (k1.dy + 2.0 * k2.dy + 2.0 * k3.dy + k4.dy);
    r.z += h / 6.0 * (k1.dz + 2.0 * k2.dz + 2.0 * k3.dz + k4.dz);
    r.v += h / 6.0 * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
    r.gamma += h / 6.0 * (k1.dgamma + 2.0 * k2.dgamma + 2.0 * k3.dgamma + k4.dgamma);
    r.psi += h / 6.0 * (k1.dpsi + 2.0 * k2.dpsi + 2.0 * k3.dpsi + k4.dpsi);
    return r;
}

}  // namespace detail

/// Advance one decision step: `substeps` RK4 steps of length dt under constant
/// controls, then clamp speed and pitch to the envelope and renormalize yaw.
inline UavState step(const UavState& s, const ControlInput& c, const PhysicsConfig& cfg) {
    if (!is_finite(s) || !is_finite(c)) throw std::domain_error("step: non-finite input");
    UavState r = s;
    for (int i = 0; i < cfg.substeps; ++i) {
        r = detail::rk4_step(r, c, cfg, cfg.dt);
    }
    r.v = std::clamp(r.v, cfg.v_min, cfg.v_max);
    r.gamma = std::clamp(r.gamma, -cfg.gamma_max, cfg.gamma_max);
    r.psi = wrap_pi(r.psi);
    return r;
}

// ---------------------------------------------------------------------------
// Discrete maneuver catalog
// ---------------------------------------------------------------------------

/// One catalog entry. nx/nz recipes may be state-dependent:
///   nx = nx_fixed, or sin(gamma) when nx_trim (speed-holding throttle)
///   nz = nz_offset, plus cos(gamma) when nz_trim (pitch-holding lift)
struct ManeuverEntry {
    std::string name;
    bool nx_trim = false;
    double nx_fixed = 0.0;
    bool nz_trim = false;
    double nz_offset = 0.0;
    double phi = 0.0;

    ControlInput evaluate(const UavState& s) const {
        ControlInput c;
        c.nx = nx_trim ? std::sin(s.gamma) : nx_fixed;
        c.nz = nz_offset + (nz_trim ? std::cos(s.gamma) : 0.0);
        c.phi = phi;
        return c;
    }

    std::string nx_recipe() const {
        return nx_trim ? "sin(gamma)" : std::to_string(nx_fixed);
    }
    std::string nz_recipe() const {
        std::string r = nz_trim ? "cos(gamma)" : "";
        if (nz_offset != 0.0) {
            if (!r.empty()) r += nz_offset > 0 ? "+" : "";
            r += std::to_string(nz_offset);
        }
        if (r.empty()) r = "0";
        return r;
    }
};

/// Exactly 15 maneuvers: 3 throttle settings x 5 flight-path primitives.
struct ManeuverCatalog {
    std::vector<ManeuverEntry> entries;

    static constexpr int kActionCount = 15;

    /// The stock catalog. Throttle levels are slow (nx=-2), hold (nx=sin gamma)
    /// and fast (nx=+2); primitives are straight, maximum-load left/right turns
    /// at 70 degrees of bank, climb and dive.
    static ManeuverCatalog standard() {
        ManeuverCatalog cat;
        struct Throttle {
            const char* tag;
            bool trim;
            double fixed;
        };
        struct Primitive {
            const char* tag;
            bool nz_trim;
            double nz_offset;
            double phi;
        };
        const Throttle throttles[3] = {
            {"slow", false, -2.0},
            {"hold", true, 0.0},
            {"fast", false, 2.0},
        };
        const Primitive primitives[5] = {
            {"straight", true, 0.0, 0.0},
            {"left", false, 5.0, -deg2rad(70.0)},
            {"right", false, 5.0, deg2rad(70.0)},
            {"climb", true, 2.0, 0.0},
            {"dive", true, -2.0, 0.0},
        };
        for (const auto& t : throttles) {
            for (const auto& p : primitives) {
                ManeuverEntry e;
                e.name = std::string(t.tag) + "_" + p.tag;
                e.nx_trim = t.trim;
                e.nx_fixed = t.fixed;
                e.nz_trim = p.nz_trim;
                e.nz_offset = p.nz_offset;
                e.phi = p.phi;
                cat.entries.push_back(e);
            }
        }
        return cat;
    }

    void validate() const {
        if (entries.size() != kActionCount)
            throw std::invalid_argument("catalog: expected exactly 15 entries, got " +
                                        std::to_string(entries.size()));
    }

    int index_of(std::string_view name) const {
        for (std::size_t i = 0; i < entries.size(); ++i)
            if (entries[i].name == name) return static_cast<int>(i);
        throw std::invalid_argument("catalog: no entry named " + std::string(name));
    }
};

/// Evaluate the catalog entry for `index` at `state`, clamped to the control
/// envelope. Pure in its inputs.
inline ControlInput resolve_action(int index, const UavState& s, const ManeuverCatalog& cat,
                                   const PhysicsConfig& cfg) {
    if (index < 0 || index >= static_cast<int>(cat.entries.size()))
        throw std::out_of_range("resolve_action: action index " + std::to_string(index) +
                                " outside catalog");
    ControlInput c = cat.entries[static_cast<std::size_t>(index)].evaluate(s);
    c.nx = std::clamp(c.nx, cfg.nx_min, cfg.nx_max);
    c.nz = std::clamp(c.nz, cfg.nz_min, cfg.nz_max);
    c.phi = std::clamp(c.phi, -kPi, kPi);
    return c;
}

}  // namespace uavpe
