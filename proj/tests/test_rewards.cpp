#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "uavpe/rewards.hpp"

using namespace uavpe;

namespace {

RelativeSituation rel_of(double au, double at, double d) {
    RelativeSituation r;
    r.alpha_u = au;
    r.alpha_t = at;
    r.d = d;
    return r;
}

std::mt19937_64 g_rng(91);

RelativeSituation random_rel() {
    std::uniform_real_distribution<double> ua(0.0, kPi), ud(1.0, 20000.0);
    return rel_of(ua(g_rng), ua(g_rng), ud(g_rng));
}

}  // namespace

TEST_CASE("pursuit angle reward endpoints and midpoint") {
    CHECK(pursuit_angle_reward(rel_of(0, 0, 1)) == Catch::Approx(1.0));
    CHECK(pursuit_angle_reward(rel_of(kPi, kPi, 1)) == Catch::Approx(0.0).margin(1e-15));
    CHECK(pursuit_angle_reward(rel_of(kPi / 2, kPi / 2, 1)) == Catch::Approx(0.5));
}

TEST_CASE("distance reward peaks at the objective distance") {
    CHECK(distance_reward(800, 800, 500) == Catch::Approx(1.0));
    CHECK(distance_reward(1300, 800, 500) == Catch::Approx(std::exp(-1.0)));
    CHECK(distance_reward(1500, 1500, 500) == Catch::Approx(1.0));
}

TEST_CASE("velocity reward projects speed onto the line of sight") {
    RewardConfig cfg;
    UavState own{0, 0, 7000, cfg.v_max, 0, 0};
    CHECK(velocity_reward(own, rel_of(0, 0, 1000), cfg.v_max) == Catch::Approx(1.0));
    CHECK(velocity_reward(own, rel_of(kPi, 0, 1000), cfg.v_max) == Catch::Approx(-1.0));
    own.v = cfg.v_max / 2.0;
    CHECK(velocity_reward(own, rel_of(kPi / 3, 0, 1000), cfg.v_max) == Catch::Approx(0.25));
    CHECK_THROWS_AS(velocity_reward(own, rel_of(0, 0, 0), cfg.v_max), std::domain_error);
}

TEST_CASE("velocity reward equals the explicit dot-product form") {
    RewardConfig cfg;
    std::uniform_real_distribution<double> uv(50.0, 400.0), ug(-1.3, 1.3), up(-3.1, 3.1),
        ux(-5000.0, 5000.0);
    for (int i = 0; i < 10000; ++i) {
        UavState own{ux(g_rng), ux(g_rng), 7000.0 + ux(g_rng) / 10.0, uv(g_rng), ug(g_rng),
                     up(g_rng)};
        Vec3 p{ux(g_rng), ux(g_rng), ux(g_rng) / 5.0};
        double d = norm(p);
        if (d < 1.0) continue;
        Vec3 vel = velocity_direction(own) * own.v;
        double want = dot(vel, p) / (cfg.v_max * d);
        RelativeSituation rel;
        rel.alpha_u = angle_between(vel, p);
        rel.d = d;
        CHECK(velocity_reward(own, rel, cfg.v_max) == Catch::Approx(want).margin(1e-12));
    }
}

TEST_CASE("bait angle reward peaks at the objective aspect") {
    RewardConfig cfg;
    CHECK(bait_angle_reward(rel_of(0, cfg.alpha_opt, 1), cfg) == Catch::Approx(1.0));
    CHECK(bait_angle_reward(rel_of(0, cfg.alpha_opt - cfg.alpha0, 1), cfg) ==
          Catch::Approx(2.0 * std::exp(-1.0) - 1.0));
    RewardConfig wide = cfg;
    wide.alpha_opt = 50.0;  // push the peak far away to probe the tail
    CHECK(bait_angle_reward(rel_of(0, 0, 1), wide) == Catch::Approx(-1.0).margin(1e-12));
}

TEST_CASE("formula fidelity on random situations") {
    RewardConfig cfg;
    std::uniform_real_distribution<double> uv(50.0, 400.0);
    for (int i = 0; i < 10000; ++i) {
        auto rel = random_rel();
        CHECK(pursuit_angle_reward(rel) ==
              Catch::Approx(1.0 - (rel.alpha_u + rel.alpha_t) / (2.0 * kPi)).margin(1e-12));
        CHECK(distance_reward(rel.d, cfg.d_opt_pursuit, cfg.d0) ==
              Catch::Approx(std::exp(-std::abs(rel.d - cfg.d_opt_pursuit) / cfg.d0))
                  .margin(1e-12));
        CHECK(bait_angle_reward(rel, cfg) ==
              Catch::Approx(2.0 * std::exp(-std::abs(rel.alpha_t - cfg.alpha_opt) / cfg.alpha0) -
                            1.0)
                  .margin(1e-12));
        UavState own{0, 0, 7000, uv(g_rng), 0, 0};
        CHECK(velocity_reward(own, rel, cfg.v_max) ==
              Catch::Approx(own.v * std::cos(rel.alpha_u) / cfg.v_max).margin(1e-12));
    }
}

TEST_CASE("unimodality: distance and bait-angle rewards strictly peak") {
    RewardConfig cfg;
    std::uniform_real_distribution<double> ud(0.0, 5000.0), ua(0.0, kPi);
    for (int i = 0; i < 5000; ++i) {
        double d1 = ud(g_rng), d2 = ud(g_rng);
        // the farther point from d_opt never scores higher
        if (std::abs(d1 - cfg.d_opt_pursuit) < std::abs(d2 - cfg.d_opt_pursuit))
            CHECK(distance_reward(d1, cfg.d_opt_pursuit, cfg.d0) >
                  distance_reward(d2, cfg.d_opt_pursuit, cfg.d0));
        double a1 = ua(g_rng), a2 = ua(g_rng);
        if (std::abs(a1 - cfg.alpha_opt) < std::abs(a2 - cfg.alpha_opt))
            CHECK(bait_angle_reward(rel_of(0, a1, 1), cfg) >
                  bait_angle_reward(rel_of(0, a2, 1), cfg));
    }
}

TEST_CASE("pursuit step reward branches") {
    RewardConfig cfg;
    UavState own{0, 0, 7000, cfg.v_max, 0, 0};
    auto best = rel_of(0, 0, cfg.d_opt_pursuit);
    OutcomeFlags none;
    CHECK(pursuit_step_reward(best, own, none, cfg) == Catch::Approx(1.0));

    OutcomeFlags won;
    won.intercepted_target = true;
    CHECK(pursuit_step_reward(best, own, won, cfg) == Catch::Approx(2.0));

    OutcomeFlags lost;
    lost.was_intercepted = true;
    CHECK(pursuit_step_reward(best, own, lost, cfg) == Catch::Approx(-2.0));

    OutcomeFlags crash;
    crash.collided = true;
    CHECK(pursuit_step_reward(best, own, crash, cfg) == Catch::Approx(-2.0));

    OutcomeFlags floor;
    floor.out_of_bounds = true;
    CHECK(pursuit_step_reward(best, own, floor, cfg) == Catch::Approx(-2.0));

    // trading interceptions in the same step counts the win
    OutcomeFlags trade;
    trade.intercepted_target = true;
    trade.was_intercepted = true;
    CHECK(pursuit_step_reward(best, own, trade, cfg) == Catch::Approx(2.0));
}

TEST_CASE("bait step reward branches") {
    RewardConfig cfg;
    auto best = rel_of(0, cfg.alpha_opt, cfg.d_opt_bait);
    OutcomeFlags none;
    CHECK(bait_step_reward(best, none, cfg) == Catch::Approx(1.0));

    OutcomeFlags lost;
    lost.was_intercepted = true;
    CHECK(bait_step_reward(best, lost, cfg) == Catch::Approx(-2.0));

    OutcomeFlags floor;
    floor.out_of_bounds = true;
    CHECK(bait_step_reward(best, floor, cfg) == Catch::Approx(-2.0));

    // the bait earns no interception bonus; the dense branch still applies
    OutcomeFlags won;
    won.intercepted_target = true;
    CHECK(bait_step_reward(best, won, cfg) == Catch::Approx(1.0));
}

TEST_CASE("contradictory outcome flags rejected") {
    RewardConfig cfg;
    UavState own{0, 0, 7000, 200, 0, 0};
    auto rel = rel_of(0.3, 0.4, 900);
    OutcomeFlags bad;
    bad.intercepted_target = true;
    bad.collided = true;
    CHECK_THROWS_AS(pursuit_step_reward(rel, own, bad, cfg), std::invalid_argument);
    OutcomeFlags bad2;
    bad2.was_intercepted = true;
    bad2.out_of_bounds = true;
    CHECK_THROWS_AS(bait_step_reward(rel, bad2, cfg), std::invalid_argument);
}

TEST_CASE("dense rewards stay inside their documented bounds") {
    RewardConfig cfg;
    std::uniform_real_distribution<double> uv(50.0, 400.0);
    for (int i = 0; i < 10000; ++i) {
        auto rel = random_rel();
        UavState own{0, 0, 7000, uv(g_rng), 0, 0};
        double p = pursuit_dense_reward(rel, own, cfg);
        CHECK(p >= -cfg.w3 - 1e-12);
        CHECK(p <= 1.0 + 1e-12);
        double b = bait_dense_reward(rel, cfg);
        CHECK(b >= -cfg.bait_w1 - 1e-12);
        CHECK(b <= 1.0 + 1e-12);
    }
}

TEST_CASE("reward config validation") {
    RewardConfig bad;
    bad.w1 = 0.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    RewardConfig bad2;
    bad2.r_punish = 1.0;
    CHECK_THROWS_AS(bad2.validate(), std::invalid_argument);
    RewardConfig bad3;
    bad3.d0 = 0.0;
    CHECK_THROWS_AS(bad3.validate(), std::invalid_argument);
}
