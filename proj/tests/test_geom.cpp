#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "uavpe/geom.hpp"

using namespace uavpe;

TEST_CASE("vector algebra basics") {
    Vec3 a{1.0, 2.0, 3.0};
    Vec3 b{-4.0, 0.5, 2.0};
    CHECK(dot(a, b) == Catch::Approx(-4.0 + 1.0 + 6.0));
    Vec3 c = cross(a, b);
    CHECK(dot(c, a) == Catch::Approx(0.0).margin(1e-12));
    CHECK(dot(c, b) == Catch::Approx(0.0).margin(1e-12));
    CHECK(norm(Vec3{3.0, 4.0, 0.0}) == Catch::Approx(5.0));
}

TEST_CASE("angle_between matches acos form on random vectors") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int i = 0; i < 10000; ++i) {
        Vec3 a{u(rng), u(rng), u(rng)};
        Vec3 b{u(rng), u(rng), u(rng)};
        if (norm(a) < 1e-6 || norm(b) < 1e-6) continue;
        double cosv = dot(a, b) / (norm(a) * norm(b));
        cosv = std::clamp(cosv, -1.0, 1.0);
        CHECK(angle_between(a, b) == Catch::Approx(std::acos(cosv)).margin(1e-9));
    }
}

TEST_CASE("angle_between endpoints and errors") {
    Vec3 x{1.0, 0.0, 0.0};
    CHECK(angle_between(x, x) == Catch::Approx(0.0).margin(1e-15));
    CHECK(angle_between(x, Vec3{-2.0, 0.0, 0.0}) == Catch::Approx(kPi));
    CHECK(angle_between(x, Vec3{0.0, 3.0, 0.0}) == Catch::Approx(kPi / 2.0));
    CHECK_THROWS_AS(angle_between(x, Vec3{0.0, 0.0, 0.0}), std::domain_error);
}

TEST_CASE("wrap_pi lands in (-pi, pi]") {
    CHECK(wrap_pi(0.0) == 0.0);
    CHECK(wrap_pi(kPi) == Catch::Approx(kPi));
    CHECK(wrap_pi(-kPi) == Catch::Approx(kPi));
    CHECK(wrap_pi(3.0 * kPi) == Catch::Approx(kPi));
    CHECK(wrap_pi(2.0 * kPi + 0.25) == Catch::Approx(0.25));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int i = 0; i < 10000; ++i) {
        double a = u(rng);
        double w = wrap_pi(a);
        CHECK(w > -kPi - 1e-12);
        CHECK(w <= kPi + 1e-12);
        CHECK(std::abs(std::remainder(w - a, 2.0 * kPi)) < 1e-9);
    }
}

TEST_CASE("degree conversions round-trip") {
    CHECK(deg2rad(180.0) == Catch::Approx(kPi));
    CHECK(rad2deg(kPi / 2.0) == Catch::Approx(90.0));
    CHECK(rad2deg(deg2rad(37.5)) == Catch::Approx(37.5));
}
