// Small 3-vector and angle helpers shared across the toolkit.
#pragma once

#include <cmath>
#include <stdexcept>

namespace uavpe {

constexpr double kPi = 3.14159265358979323846;

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
inline Vec3 operator*(const Vec3& a, double s) { return s * a; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// Angle between two nonzero vectors in [0, pi], via atan2 of the cross/dot
/// pair (well conditioned near 0 and pi).
inline double angle_between(const Vec3& a, const Vec3& b) {
    const double c = norm(cross(a, b));
    const double d = dot(a, b);
    if (c == 0.0 && d == 0.0) throw std::domain_error("angle_between: zero-length vector");
    return std::atan2(c, d);
}

/// Normalize an angle to (-pi, pi].
inline double wrap_pi(double a) {
    a = std::fmod(a, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
    else if (a > kPi) a -= 2.0 * kPi;
    return a;
}

}  // namespace uavpe
