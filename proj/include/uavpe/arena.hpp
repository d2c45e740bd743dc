// The pursuit-evasion environment: seeded initialization with a central
// vacuum zone, decision-step simulation with interception and removal, the
// periodic role/target allocation rules, and full episode records.
#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "uavpe/engagement.hpp"
#include "uavpe/flight_dynamics.hpp"
#include "uavpe/opponents.hpp"
#include "uavpe/rewards.hpp"
#include "uavpe/rng.hpp"

namespace uavpe {

enum class Role { pursuit, bait };

inline const char* role_name(Role r) { return r == Role::pursuit ? "pursuit" : "bait"; }

enum class BluePolicyKind { maximin, scripted_straight, scripted_circling, scripted_random };

enum class Outcome { win, lose, standoff };

inline const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::win: return "win";
        case Outcome::lose: return "lose";
        case Outcome::standoff: return "standoff";
    }
    return "?";
}

struct ScenarioConfig {
    int red_count = 1;
    int blue_count = 1;
    std::vector<Role> red_roles = {Role::pursuit};
    BluePolicyKind blue_policy = BluePolicyKind::scripted_straight;
    double time_limit_s = 180.0;
    int realloc_period = 10;  // decision steps between allocation passes
    bool fixed_roles = false;  // reallocate targets only (training mode)

    // initialization geometry: box and vacuum zone are centered on the
    // origin horizontally and on z_center vertically
    double box_x = 20000.0;
    double box_y = 20000.0;
    double box_z = 6000.0;
    double vacuum_x = 4000.0;
    double vacuum_y = 4000.0;
    double vacuum_z = 6000.0;
    double z_center = 7000.0;
    double red_spacing = 1000.0;
    double speed_min = 150.0;
    double speed_max = 250.0;

    void validate() const {
        if (red_count < 1 || blue_count < 1)
            throw std::invalid_argument("scenario: need at least one UAV per side");
        if (static_cast<int>(red_roles.size()) != red_count)
            throw std::invalid_argument("scenario: red_roles must list one role per red UAV");
        if (!(time_limit_s >= 0.0)) throw std::invalid_argument("scenario: negative time limit");
        if (realloc_period < 1)
            throw std::invalid_argument("scenario: realloc_period must be >= 1");
        if (!(vacuum_x <= box_x && vacuum_y <= box_y && vacuum_z <= box_z))
            throw std::invalid_argument("scenario: vacuum zone must fit inside the init box");
        if (!(speed_min > 0.0 && speed_min <= speed_max))
            throw std::invalid_argument("scenario: malformed speed range");
    }
};

struct Event {
    double t = 0.0;
    std::string kind;     // interception | collision | out_of_bound
    std::string subject;  // acting UAV ("red0", "blue1") or the victim for bounds
    std::string object;   // victim for interception/collision, empty for bounds
};

struct RedUav {
    UavState s;
    bool alive = true;
    bool death_logged = false;
    Role role = Role::pursuit;
    int target = 0;  // index into blue roster
};

struct BlueUav {
    UavState s;
    bool alive = true;
    bool death_logged = false;
    ScriptedPolicy script;
};

struct EngagementWorld {
    std::vector<RedUav> red;
    std::vector<BlueUav> blue;
    int step_count = 0;
    int max_steps = 0;
    bool over = false;
    Outcome outcome = Outcome::standoff;
    std::vector<Event> events;

    int live_red() const {
        int n = 0;
        for (const auto& u : red) n += u.alive ? 1 : 0;
        return n;
    }
    int live_blue() const {
        int n = 0;
        for (const auto& u : blue) n += u.alive ? 1 : 0;
        return n;
    }
};

/// Per-step returns for the red UAVs that acted (the ones alive at entry).
/// done marks the end of that UAV's decision process: its own death or a
/// decisive episode end. A time-limit standoff leaves done unset because the
/// clock is not part of the observation, so value estimates must bootstrap
/// across the cutoff.
struct StepResult {
    std::vector<int> acting_red;
    std::vector<double> rewards;
    std::vector<Observation> next_obs;
    std::vector<bool> done;
    bool any_interception = false;
};

struct TrajectoryRow {
    double t = 0.0;
    char side = 'r';
    int id = 0;
    Role role = Role::pursuit;
    double x = 0, y = 0, z = 0, v = 0, gamma = 0, psi = 0;
    bool alive = true;
};

struct RewardTraceRow {
    double t = 0.0;
    int red_id = 0;
    double pursuit_score = 0.0;
};

struct EpisodeRecord {
    Outcome outcome = Outcome::standoff;
    double duration_s = 0.0;
    int steps = 0;
    std::vector<Event> events;
    std::vector<TrajectoryRow> trajectory;
    std::vector<RewardTraceRow> reward_trace;
    std::vector<double> red_return;  // summed step rewards per red roster slot
    std::uint64_t seed = 0;
    std::string config_hash;
};

/// Action source for the red side during an episode.
using RedPolicyFn = std::function<int(int red_idx, Role role, const Observation& obs, int step)>;

/// The environment: configuration bundle plus the simulation operations.
/// Worlds are value types owned by their caller; an Arena is read-only during
/// stepping and safe to share across threads.
class Arena {
  public:
    PhysicsConfig physics;
    EngagementConfig engagement;
    RewardConfig rewards;
    ScenarioConfig scenario;
    ManeuverCatalog catalog = ManeuverCatalog::standard();

    Arena() = default;
    Arena(const PhysicsConfig& p, const EngagementConfig& e, const RewardConfig& r,
          const ScenarioConfig& s)
        : physics(p), engagement(e), rewards(r), scenario(s) {
        validate();
    }

    void validate() const {
        physics.validate();
        engagement.validate();
        rewards.validate();
        scenario.validate();
        catalog.validate();
    }

    ObsNormalizer normalizer() const { return ObsNormalizer(engagement, physics); }

    double decision_interval() const { return physics.decision_interval(); }

    int max_steps() const {
        return static_cast<int>(std::llround(scenario.time_limit_s / decision_interval()));
    }

    /// Seeded world setup: red UAVs in a fixed lateral formation at the box
    /// center altitude heading +y; blue UAVs rejection-sampled uniformly in
    /// the box outside the vacuum zone with random yaw. All speeds drawn from
    /// the configured range.
    EngagementWorld initialize(std::mt19937_64& rng) const {
        EngagementWorld w;
        w.max_steps = max_steps();
        std::uniform_real_distribution<double> uspeed(scenario.speed_min, scenario.speed_max);
        for (int k = 0; k < scenario.red_count; ++k) {
            RedUav u;
            u.s.x = k * scenario.red_spacing;
            u.s.y = 0.0;
            u.s.z = scenario.z_center;
            u.s.v = uspeed(rng);
            u.s.gamma = 0.0;
            u.s.psi = 0.0;
            u.role = scenario.red_roles[k];
            u.target = 0;
            w.red.push_back(u);
        }
        std::uniform_real_distribution<double> ux(-scenario.box_x / 2.0, scenario.box_x / 2.0);
        std::uniform_real_distribution<double> uy(-scenario.box_y / 2.0, scenario.box_y / 2.0);
        std::uniform_real_distribution<double> uz(scenario.z_center - scenario.box_z / 2.0,
                                                  scenario.z_center + scenario.box_z / 2.0);
        std::uniform_real_distribution<double> uyaw(-kPi, kPi);
        for (int k = 0; k < scenario.blue_count; ++k) {
            BlueUav u;
            do {
                u.s.x = ux(rng);
                u.s.y = uy(rng);
                u.s.z = uz(rng);
            } while (in_vacuum_zone(u.s));
            u.s.v = uspeed(rng);
            u.s.gamma = 0.0;
            u.s.psi = wrap_pi(uyaw(rng));
            u.script = make_script(rng);
            w.blue.push_back(u);
        }
        return w;
    }

    bool in_vacuum_zone(const UavState& s) const {
        return std::abs(s.x) < scenario.vacuum_x / 2.0 && std::abs(s.y) < scenario.vacuum_y / 2.0 &&
               std::abs(s.z - scenario.z_center) < scenario.vacuum_z / 2.0;
    }

    Observation observe_red(const EngagementWorld& w, int red_idx) const {
        const auto& u = w.red.at(red_idx);
        return observe(u.s, w.blue.at(u.target).s, normalizer());
    }

    /// Advance one decision interval. Blue actions come from the configured
    /// blue policy; interceptions are judged symmetrically on the post-step
    /// states and all removals of the step are simultaneous. When an
    /// interception leaves dangling target assignments the allocation pass
    /// runs before next observations are taken.
    StepResult world_step(EngagementWorld& w, const std::vector<int>& red_actions) const {
        if (w.over) throw std::logic_error("world_step: episode already over");
        StepResult res;
        for (int i = 0; i < static_cast<int>(w.red.size()); ++i)
            if (w.red[i].alive) res.acting_red.push_back(i);
        if (red_actions.size() != res.acting_red.size())
            throw std::invalid_argument("world_step: need exactly one action per live red UAV");

        // remember each acting red's target for reward scoring
        std::vector<int> scored_target(w.red.size(), 0);
        for (int i : res.acting_red) scored_target[i] = w.red[i].target;

        // blue decisions on the pre-step states
        std::vector<int> blue_actions(w.blue.size(), 0);
        for (int b = 0; b < static_cast<int>(w.blue.size()); ++b) {
            if (!w.blue[b].alive) continue;
            blue_actions[b] = blue_action(w, b);
        }

        // integrate everyone
        for (std::size_t k = 0; k < res.acting_red.size(); ++k) {
            auto& u = w.red[res.acting_red[k]];
            u.s = step(u.s, resolve_action(red_actions[k], u.s, catalog, physics), physics);
        }
        for (int b = 0; b < static_cast<int>(w.blue.size()); ++b) {
            auto& u = w.blue[b];
            if (!u.alive) continue;
            u.s = step(u.s, resolve_action(blue_actions[b], u.s, catalog, physics), physics);
        }

        const double t_now = (w.step_count + 1) * decision_interval();
        std::vector<OutcomeFlags> flags(w.red.size());

        // altitude bounds
        for (int i = 0; i < static_cast<int>(w.red.size()); ++i) {
            auto& u = w.red[i];
            if (u.alive && out_of_bounds(u.s, engagement)) {
                u.alive = false;
                flags[i].out_of_bounds = true;
                w.events.push_back({t_now, "out_of_bound", red_name(i), ""});
            }
        }
        for (int b = 0; b < static_cast<int>(w.blue.size()); ++b) {
            auto& u = w.blue[b];
            if (u.alive && out_of_bounds(u.s, engagement)) {
                u.alive = false;
                w.events.push_back({t_now, "out_of_bound", blue_name(b), ""});
            }
        }

        // collisions between surviving opponents; both aircraft are lost
        for (int i = 0; i < static_cast<int>(w.red.size()); ++i) {
            for (int b = 0; b < static_cast<int>(w.blue.size()); ++b) {
                if (!w.red[i].alive || !w.blue[b].alive) continue;
                if (collided(w.red[i].s, w.blue[b].s, engagement)) {
                    w.red[i].alive = false;
                    w.blue[b].alive = false;
                    flags[i].collided = true;
                    w.events.push_back({t_now, "collision", red_name(i), blue_name(b)});
                }
            }
        }

        // interceptions among survivors, both directions, judged on one
        // snapshot so simultaneous kills all count
        std::vector<bool> red_hit(w.red.size(), false), blue_hit(w.blue.size(), false);
        for (int i = 0; i < static_cast<int>(w.red.size()); ++i) {
            for (int b = 0; b < static_cast<int>(w.blue.size()); ++b) {
                if (!w.red[i].alive || !w.blue[b].alive) continue;
                const RelativeSituation rb = relative_situation(w.red[i].s, w.blue[b].s);
                if (is_intercepted(rb, engagement)) {
                    blue_hit[b] = true;
                    flags[i].intercepted_target = true;
                    res.any_interception = true;
                    w.events.push_back({t_now, "interception", red_name(i), blue_name(b)});
                }
                const RelativeSituation br = relative_situation(w.blue[b].s, w.red[i].s);
                if (is_intercepted(br, engagement)) {
                    red_hit[i] = true;
                    flags[i].was_intercepted = true;
                    res.any_interception = true;
                    w.events.push_back({t_now, "interception", blue_name(b), red_name(i)});
                }
            }
        }
        for (int i = 0; i < static_cast<int>(w.red.size()); ++i)
            if (red_hit[i]) w.red[i].alive = false;
        for (int b = 0; b < static_cast<int>(w.blue.size()); ++b)
            if (blue_hit[b]) w.blue[b].alive = false;

        // rewards on the post-step snapshot, against each red's scored target
        const ObsNormalizer nz = normalizer();
        for (int i : res.acting_red) {
            // a red that achieved an interception never also takes the
            // intercepted penalty in the same step
            if (flags[i].intercepted_target) flags[i].was_intercepted = false;
            const UavState& own = w.red[i].s;
            const UavState& tgt = w.blue[scored_target[i]].s;
            const RelativeSituation rel = relative_situation(own, tgt);
            const double r = w.red[i].role == Role::pursuit
                                 ? pursuit_step_reward(rel, own, flags[i], rewards)
                                 : bait_step_reward(rel, flags[i], rewards);
            res.rewards.push_back(r);
        }

        w.step_count += 1;
        if (w.live_blue() == 0) {
            w.over = true;
            w.outcome = Outcome::win;
        } else if (w.live_red() == 0) {
            w.over = true;
            w.outcome = Outcome::lose;
        } else if (w.step_count >= w.max_steps) {
            w.over = true;
            w.outcome = Outcome::standoff;
        }

        if (res.any_interception && !w.over) allocate(w);

        for (int i : res.acting_red) {
            const int tgt = w.red[i].alive && w.blue[w.red[i].target].alive
                                ? w.red[i].target
                                : scored_target[i];
            res.next_obs.push_back(observe(w.red[i].s, w.blue[tgt].s, nz));
            res.done.push_back(!w.red[i].alive || (w.over && w.outcome != Outcome::standoff));
        }
        return res;
    }

    /// Role/target allocation. Roles follow the live-count rules (single
    /// opponent: everyone pursues; two-on-two: the best-scoring pair becomes
    /// the pursuit pair and the other red baits the other blue; three-on-two:
    /// the two reds scoring best against one blue pursue it together and the
    /// third baits the remaining blue). With fixed_roles only targets move.
    void allocate(EngagementWorld& w) const {
        std::vector<int> reds, blues;
        for (int i = 0; i < static_cast<int>(w.red.size()); ++i)
            if (w.red[i].alive) reds.push_back(i);
        for (int b = 0; b < static_cast<int>(w.blue.size()); ++b)
            if (w.blue[b].alive) blues.push_back(b);
        if (blues.empty()) throw std::logic_error("allocate: no live blue UAV");
        if (reds.empty()) return;

        auto score = [&](int r, int b) {
            const RelativeSituation rel = relative_situation(w.red[r].s, w.blue[b].s);
            return pursuit_dense_reward(rel, w.red[r].s, rewards);
        };
        auto nearest_blue = [&](int r) {
            int best = blues.front();
            double best_d = std::numeric_limits<double>::infinity();
            for (int b : blues) {
                const double d = norm(position(w.blue[b].s) - position(w.red[r].s));
                if (d < best_d) {
                    best_d = d;
                    best = b;
                }
            }
            return best;
        };

        if (scenario.fixed_roles) {
            allocate_targets_only(w, reds, blues, score, nearest_blue);
            return;
        }

        if (blues.size() == 1) {
            for (int r : reds) {
                w.red[r].role = Role::pursuit;
                w.red[r].target = blues.front();
            }
            return;
        }
        if (reds.size() == 1) {
            w.red[reds.front()].role = Role::pursuit;
            w.red[reds.front()].target = nearest_blue(reds.front());
            return;
        }
        if (reds.size() == 2 && blues.size() == 2) {
            // the best (red, blue) pursuit pairing wins; the other red baits
            // the other blue
            int br = reds[0], bb = blues[0];
            double best = -std::numeric_limits<double>::infinity();
            for (int r : reds)
                for (int b : blues)
                    if (score(r, b) > best) {
                        best = score(r, b);
                        br = r;
                        bb = b;
                    }
            const int other_r = reds[0] == br ? reds[1] : reds[0];
            const int other_b = blues[0] == bb ? blues[1] : blues[0];
            w.red[br].role = Role::pursuit;
            w.red[br].target = bb;
            w.red[other_r].role = Role::bait;
            w.red[other_r].target = other_b;
            return;
        }
        if (reds.size() == 3 && blues.size() == 2) {
            // pick the blue whose two best red scores sum highest; those two
            // reds pursue it together
            int best_b = blues[0];
            double best_sum = -std::numeric_limits<double>::infinity();
            std::vector<int> best_pair;
            for (int b : blues) {
                std::vector<std::pair<double, int>> sc;
                for (int r : reds) sc.push_back({score(r, b), r});
                std::sort(sc.rbegin(), sc.rend());
                const double sum = sc[0].first + sc[1].first;
                if (sum > best_sum) {
                    best_sum = sum;
                    best_b = b;
                    best_pair = {sc[0].second, sc[1].second};
                }
            }
            const int other_b = blues[0] == best_b ? blues[1] : blues[0];
            for (int r : reds) {
                const bool pursuer = r == best_pair[0] || r == best_pair[1];
                w.red[r].role = pursuer ? Role::pursuit : Role::bait;
                w.red[r].target = pursuer ? best_b : other_b;
            }
            return;
        }
        // outside the tabulated scenarios everyone just pursues the nearest
        for (int r : reds) {
            w.red[r].role = Role::pursuit;
            w.red[r].target = nearest_blue(r);
        }
    }

    /// Score an episode-long run under one red policy, recording rewards,
    /// trajectories and the pursuit-score trace. Rows are sampled at the
    /// entry of each decision step; a removed UAV logs one closing row with
    /// alive=0 if the episode continues past its removal.
    EpisodeRecord run_episode(const RedPolicyFn& red_policy, std::uint64_t seed,
                              bool record_rows = true) const {
        auto rng = make_stream(seed, "episode.init");
        EngagementWorld w = initialize(rng);
        allocate(w);
        EpisodeRecord rec;
        rec.seed = seed;
        rec.red_return.assign(w.red.size(), 0.0);
        const ObsNormalizer nz = normalizer();
        while (!w.over && w.max_steps > 0) {
            if (w.step_count > 0 && w.step_count % scenario.realloc_period == 0) allocate(w);
            if (record_rows) record_step_rows(w, rec);
            std::vector<int> actions;
            std::vector<int> acting;
            for (int i = 0; i < static_cast<int>(w.red.size()); ++i) {
                if (!w.red[i].alive) continue;
                acting.push_back(i);
                const Observation obs = observe(w.red[i].s, w.blue[w.red[i].target].s, nz);
                actions.push_back(red_policy(i, w.red[i].role, obs, w.step_count));
            }
            StepResult sr = world_step(w, actions);
            for (std::size_t k = 0; k < sr.acting_red.size(); ++k)
                rec.red_return[sr.acting_red[k]] += sr.rewards[k];
        }
        rec.outcome = w.over ? w.outcome : Outcome::standoff;
        rec.steps = w.step_count;
        rec.duration_s = w.step_count * decision_interval();
        rec.events = w.events;
        return rec;
    }

    std::string red_name(int i) const { return "red" + std::to_string(i); }
    std::string blue_name(int b) const { return "blue" + std::to_string(b); }

  private:
    ScriptedPolicy make_script(std::mt19937_64& rng) const {
        ScriptedPolicy p;
        switch (scenario.blue_policy) {
            case BluePolicyKind::scripted_straight:
                p.variant = ScriptedPolicy::Variant::straight;
                break;
            case BluePolicyKind::scripted_circling:
                p.variant = ScriptedPolicy::Variant::circling;
                break;
            case BluePolicyKind::scripted_random:
                p.variant = ScriptedPolicy::Variant::random;
                break;
            case BluePolicyKind::maximin:
                p.variant = ScriptedPolicy::Variant::straight;  // unused
                break;
        }
        p.seed = rng();
        return p;
    }

    int blue_action(const EngagementWorld& w, int b) const {
        if (scenario.blue_policy == BluePolicyKind::maximin) {
            std::vector<PayoffMatrix> ms;
            for (const auto& r : w.red)
                if (r.alive)
                    ms.push_back(
                        build_payoff(w.blue[b].s, r.s, catalog, physics, rewards, engagement));
            if (ms.empty()) return w.blue[b].script.straight_action;
            return maximin_action(ms);
        }
        return scripted_action(w.blue[b].script, w.step_count);
    }

    template <typename ScoreFn, typename NearestFn>
    void allocate_targets_only(EngagementWorld& w, const std::vector<int>& reds,
                               const std::vector<int>& blues, ScoreFn score,
                               NearestFn nearest_blue) const {
        std::vector<int> pursuers, baits;
        for (int r : reds)
            (w.red[r].role == Role::pursuit ? pursuers : baits).push_back(r);
        int pursued = -1;
        if (!pursuers.empty()) {
            if (blues.size() == 1) {
                pursued = blues.front();
            } else {
                double best = -std::numeric_limits<double>::infinity();
                for (int b : blues) {
                    double sum = 0.0;
                    for (int r : pursuers) sum += score(r, b);
                    if (sum > best) {
                        best = sum;
                        pursued = b;
                    }
                }
            }
            for (int r : pursuers) w.red[r].target = pursued;
        }
        for (int r : baits) {
            int pick = -1;
            for (int b : blues)
                if (b != pursued) {
                    pick = b;
                    break;
                }
            w.red[r].target = pick >= 0 ? pick : nearest_blue(r);
        }
    }

    void record_step_rows(EngagementWorld& w, EpisodeRecord& rec) const {
        const double t = w.step_count * decision_interval();
        for (int i = 0; i < static_cast<int>(w.red.size()); ++i) {
            auto& u = w.red[i];
            if (!u.alive && u.death_logged) continue;
            rec.trajectory.push_back({t, 'r', i, u.role, u.s.x, u.s.y, u.s.z, u.s.v, u.s.gamma,
                                      u.s.psi, u.alive});
            if (!u.alive) u.death_logged = true;
            if (u.alive) {
                const RelativeSituation rel = relative_situation(u.s, w.blue[u.target].s);
                rec.reward_trace.push_back({t, i, pursuit_dense_reward(rel, u.s, rewards)});
            }
        }
        for (int b = 0; b < static_cast<int>(w.blue.size()); ++b) {
            auto& u = w.blue[b];
            if (!u.alive && u.death_logged) continue;
            rec.trajectory.push_back({t, 'b', b, Role::pursuit, u.s.x, u.s.y, u.s.z, u.s.v,
                                      u.s.gamma, u.s.psi, u.alive});
            if (!u.alive) u.death_logged = true;
        }
    }
};

}  // namespace uavpe
