// Run configuration: one JSON tree covering every module section, loaded
// from a file with dotted-path command-line overrides. Unknown keys are
// rejected with their full path; the canonical dump hashes to a short id
// that stamps metrics and checkpoint sidecars.
#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "uavpe/arena.hpp"
#include "uavpe/replay.hpp"
#include "uavpe/rng.hpp"
#include "uavpe/trainer.hpp"

namespace uavpe {

using nlohmann::json;

struct NetworkConfig {
    std::vector<int> hidden = {512, 1024, 512};
    double lr = 1e-4;
    double gamma = 0.95;
    int batch_size = 1024;
    int target_sync_period = 1000;

    void validate() const {
        if (hidden.empty()) throw std::invalid_argument("network: need at least one hidden layer");
        for (int n : hidden)
            if (n < 1) throw std::invalid_argument("network: hidden widths must be positive");
    }
};

struct TrainerSection {
    int workers = 4;
    std::vector<double> epsilon_ladder = {0.05, 0.1, 0.2, 0.4};
    int train_every = 4;
    int warmup_min = 5000;
    int snapshot_refresh = 200;
    bool deterministic = false;
};

/// The merged configuration tree. Angles are radians, distances meters,
/// exactly as the module structs hold them.
struct RunConfig {
    std::uint64_t seed = 1;
    std::string output_dir = "runs/out";
    PhysicsConfig physics;
    EngagementConfig engagement;
    RewardConfig rewards;
    PerConfig per;
    NetworkConfig network;
    TrainerSection trainer;
    ScenarioConfig scenario;

    std::vector<int> net_sizes() const {
        std::vector<int> sizes;
        sizes.push_back(kObsDim);
        sizes.insert(sizes.end(), network.hidden.begin(), network.hidden.end());
        sizes.push_back(ManeuverCatalog::kActionCount);
        return sizes;
    }

    TrainerConfig trainer_config() const {
        TrainerConfig t;
        t.workers = trainer.workers;
        t.epsilon_ladder = trainer.epsilon_ladder;
        t.gamma = network.gamma;
        t.batch_size = network.batch_size;
        t.target_sync_period = network.target_sync_period;
        t.train_every = trainer.train_every;
        t.warmup_min = trainer.warmup_min;
        t.snapshot_refresh = trainer.snapshot_refresh;
        t.lr = network.lr;
        t.deterministic = trainer.deterministic;
        return t;
    }

    void validate() const {
        physics.validate();
        engagement.validate();
        rewards.validate();
        per.validate();
        network.validate();
        trainer_config().validate();
        scenario.validate();
    }
};

// ---------------------------------------------------------------------------
// Enum name tables
// ---------------------------------------------------------------------------

inline std::string blue_policy_name(BluePolicyKind k) {
    switch (k) {
        case BluePolicyKind::maximin: return "maximin";
        case BluePolicyKind::scripted_straight: return "scripted_straight";
        case BluePolicyKind::scripted_circling: return "scripted_circling";
        case BluePolicyKind::scripted_random: return "scripted_random";
    }
    return "?";
}

inline BluePolicyKind blue_policy_from_name(const std::string& s) {
    if (s == "maximin") return BluePolicyKind::maximin;
    if (s == "scripted_straight") return BluePolicyKind::scripted_straight;
    if (s == "scripted_circling") return BluePolicyKind::scripted_circling;
    if (s == "scripted_random") return BluePolicyKind::scripted_random;
    throw std::invalid_argument("config: unknown blue_policy \"" + s + "\"");
}

inline Role role_from_name(const std::string& s) {
    if (s == "pursuit") return Role::pursuit;
    if (s == "bait") return Role::bait;
    throw std::invalid_argument("config: unknown role \"" + s + "\"");
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline json to_json(const RunConfig& c) {
    json j;
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir;
    j["physics"] = {{"g", c.physics.g},
                    {"dt", c.physics.dt},
                    {"substeps", c.physics.substeps},
                    {"v_min", c.physics.v_min},
                    {"v_max", c.physics.v_max},
                    {"gamma_max", c.physics.gamma_max},
                    {"nx_min", c.physics.nx_min},
                    {"nx_max", c.physics.nx_max},
                    {"nz_min", c.physics.nz_min},
                    {"nz_max", c.physics.nz_max}};
    j["engagement"] = {{"intercept_atu_max", c.engagement.intercept_atu_max},
                       {"intercept_att_max", c.engagement.intercept_att_max},
                       {"intercept_d_max", c.engagement.intercept_d_max},
                       {"z_floor", c.engagement.z_floor},
                       {"z_ceiling", c.engagement.z_ceiling},
                       {"collision_radius", c.engagement.collision_radius}};
    j["rewards"] = {{"w1", c.rewards.w1},
                    {"w2", c.rewards.w2},
                    {"w3", c.rewards.w3},
                    {"bait_w1", c.rewards.bait_w1},
                    {"bait_w2", c.rewards.bait_w2},
                    {"d_opt_pursuit", c.rewards.d_opt_pursuit},
                    {"d_opt_bait", c.rewards.d_opt_bait},
                    {"d0", c.rewards.d0},
                    {"alpha_opt", c.rewards.alpha_opt},
                    {"alpha0", c.rewards.alpha0},
                    {"r_final", c.rewards.r_final},
                    {"r_punish", c.rewards.r_punish},
                    {"v_max", c.rewards.v_max}};
    j["per"] = {{"capacity", c.per.capacity},
                {"a_per", c.per.a_per},
                {"b_start", c.per.b_start},
                {"b_end", c.per.b_end},
                {"epsilon_per", c.per.epsilon_per}};
    j["network"] = {{"hidden", c.network.hidden},
                    {"lr", c.network.lr},
                    {"gamma", c.network.gamma},
                    {"batch_size", c.network.batch_size},
                    {"target_sync_period", c.network.target_sync_period}};
    j["trainer"] = {{"workers", c.trainer.workers},
                    {"epsilon_ladder", c.trainer.epsilon_ladder},
                    {"train_every", c.trainer.train_every},
                    {"warmup_min", c.trainer.warmup_min},
                    {"snapshot_refresh", c.trainer.snapshot_refresh},
                    {"deterministic", c.trainer.deterministic}};
    std::vector<std::string> roles;
    for (Role r : c.scenario.red_roles) roles.push_back(role_name(r));
    j["scenario"] = {{"red_count", c.scenario.red_count},
                     {"blue_count", c.scenario.blue_count},
                     {"red_roles", roles},
                     {"blue_policy", blue_policy_name(c.scenario.blue_policy)},
                     {"time_limit_s", c.scenario.time_limit_s},
                     {"realloc_period", c.scenario.realloc_period},
                     {"fixed_roles", c.scenario.fixed_roles},
                     {"box_x", c.scenario.box_x},
                     {"box_y", c.scenario.box_y},
                     {"box_z", c.scenario.box_z},
                     {"vacuum_x", c.scenario.vacuum_x},
                     {"vacuum_y", c.scenario.vacuum_y},
                     {"vacuum_z", c.scenario.vacuum_z},
                     {"z_center", c.scenario.z_center},
                     {"red_spacing", c.scenario.red_spacing},
                     {"speed_min", c.scenario.speed_min},
                     {"speed_max", c.scenario.speed_max}};
    return j;
}

/// Reject any key the default tree does not know, naming its full path.
inline void check_unknown_keys(const json& input, const json& schema, const std::string& prefix) {
    if (!input.is_object()) return;
    for (const auto& [key, value] : input.items()) {
        const std::string path = prefix.empty() ? key : prefix + "." + key;
        if (!schema.is_object() || !schema.contains(key))
            throw std::invalid_argument("config: unknown key \"" + path + "\"");
        if (value.is_object()) check_unknown_keys(value, schema.at(key), path);
    }
}

namespace detail {

template <typename T>
void read_field(const json& j, const char* key, T& out) {
    if (j.contains(key)) j.at(key).get_to(out);
}

}  // namespace detail

inline RunConfig config_from_json(const json& j) {
    RunConfig c;
    check_unknown_keys(j, to_json(c), "");
    detail::read_field(j, "seed", c.seed);
    detail::read_field(j, "output_dir", c.output_dir);
    if (j.contains("physics")) {
        const json& s = j.at("physics");
        detail::read_field(s, "g", c.physics.g);
        detail::read_field(s, "dt", c.physics.dt);
        detail::read_field(s, "substeps", c.physics.substeps);
        detail::read_field(s, "v_min", c.physics.v_min);
        detail::read_field(s, "v_max", c.physics.v_max);
        detail::read_field(s, "gamma_max", c.physics.gamma_max);
        detail::read_field(s, "nx_min", c.physics.nx_min);
        detail::read_field(s, "nx_max", c.physics.nx_max);
        detail::read_field(s, "nz_min", c.physics.nz_min);
        detail::read_field(s, "nz_max", c.physics.nz_max);
    }
    if (j.contains("engagement")) {
        const json& s = j.at("engagement");
        detail::read_field(s, "intercept_atu_max", c.engagement.intercept_atu_max);
        detail::read_field(s, "intercept_att_max", c.engagement.intercept_att_max);
        detail::read_field(s, "intercept_d_max", c.engagement.intercept_d_max);
        detail::read_field(s, "z_floor", c.engagement.z_floor);
        detail::read_field(s, "z_ceiling", c.engagement.z_ceiling);
        detail::read_field(s, "collision_radius", c.engagement.collision_radius);
    }
    if (j.contains("rewards")) {
        const json& s = j.at("rewards");
        detail::read_field(s, "w1", c.rewards.w1);
        detail::read_field(s, "w2", c.rewards.w2);
        detail::read_field(s, "w3", c.rewards.w3);
        detail::read_field(s, "bait_w1", c.rewards.bait_w1);
        detail::read_field(s, "bait_w2", c.rewards.bait_w2);
        detail::read_field(s, "d_opt_pursuit", c.rewards.d_opt_pursuit);
        detail::read_field(s, "d_opt_bait", c.rewards.d_opt_bait);
        detail::read_field(s, "d0", c.rewards.d0);
        detail::read_field(s, "alpha_opt", c.rewards.alpha_opt);
        detail::read_field(s, "alpha0", c.rewards.alpha0);
        detail::read_field(s, "r_final", c.rewards.r_final);
        detail::read_field(s, "r_punish", c.rewards.r_punish);
        detail::read_field(s, "v_max", c.rewards.v_max);
    }
    if (j.contains("per")) {
        const json& s = j.at("per");
        detail::read_field(s, "capacity", c.per.capacity);
        detail::read_field(s, "a_per", c.per.a_per);
        detail::read_field(s, "b_start", c.per.b_start);
        detail::read_field(s, "b_end", c.per.b_end);
        detail::read_field(s, "epsilon_per", c.per.epsilon_per);
    }
    if (j.contains("network")) {
        const json& s = j.at("network");
        detail::read_field(s, "hidden", c.network.hidden);
        detail::read_field(s, "lr", c.network.lr);
        detail::read_field(s, "gamma", c.network.gamma);
        detail::read_field(s, "batch_size", c.network.batch_size);
        detail::read_field(s, "target_sync_period", c.network.target_sync_period);
    }
    if (j.contains("trainer")) {
        const json& s = j.at("trainer");
        detail::read_field(s, "workers", c.trainer.workers);
        detail::read_field(s, "epsilon_ladder", c.trainer.epsilon_ladder);
        detail::read_field(s, "train_every", c.trainer.train_every);
        detail::read_field(s, "warmup_min", c.trainer.warmup_min);
        detail::read_field(s, "snapshot_refresh", c.trainer.snapshot_refresh);
        detail::read_field(s, "deterministic", c.trainer.deterministic);
    }
    if (j.contains("scenario")) {
        const json& s = j.at("scenario");
        detail::read_field(s, "red_count", c.scenario.red_count);
        detail::read_field(s, "blue_count", c.scenario.blue_count);
        if (s.contains("red_roles")) {
            std::vector<std::string> names;
            s.at("red_roles").get_to(names);
            c.scenario.red_roles.clear();
            for (const auto& n : names) c.scenario.red_roles.push_back(role_from_name(n));
        }
        if (s.contains("blue_policy"))
            c.scenario.blue_policy = blue_policy_from_name(s.at("blue_policy").get<std::string>());
        detail::read_field(s, "time_limit_s", c.scenario.time_limit_s);
        detail::read_field(s, "realloc_period", c.scenario.realloc_period);
        detail::read_field(s, "fixed_roles", c.scenario.fixed_roles);
        detail::read_field(s, "box_x", c.scenario.box_x);
        detail::read_field(s, "box_y", c.scenario.box_y);
        detail::read_field(s, "box_z", c.scenario.box_z);
        detail::read_field(s, "vacuum_x", c.scenario.vacuum_x);
        detail::read_field(s, "vacuum_y", c.scenario.vacuum_y);
        detail::read_field(s, "vacuum_z", c.scenario.vacuum_z);
        detail::read_field(s, "z_center", c.scenario.z_center);
        detail::read_field(s, "red_spacing", c.scenario.red_spacing);
        detail::read_field(s, "speed_min", c.scenario.speed_min);
        detail::read_field(s, "speed_max", c.scenario.speed_max);
    }
    return c;
}

// ---------------------------------------------------------------------------
// Overrides, loading, hashing
// ---------------------------------------------------------------------------

/// Apply one "dotted.path=value" override onto a config tree. The path must
/// already exist; values parse as JSON when possible and fall back to string.
inline void apply_override(json& tree, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("config: override \"" + spec + "\" is not key=value");
    const std::string path = spec.substr(0, eq);
    const std::string raw = spec.substr(eq + 1);

    std::vector<std::string> parts;
    std::stringstream ss(path);
    std::string part;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    if (parts.empty()) throw std::invalid_argument("config: empty override path");

    json* node = &tree;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        if (!node->is_object() || !node->contains(parts[i]))
            throw std::invalid_argument("config: unknown key \"" + path + "\"");
        node = &node->at(parts[i]);
    }
    if (!node->is_object() || !node->contains(parts.back()))
        throw std::invalid_argument("config: unknown key \"" + path + "\"");

    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;  // bare strings need no quotes
    node->at(parts.back()) = value;
}

inline json default_config_tree() { return to_json(RunConfig{}); }

/// Load a config file (or start from defaults with an empty path), apply
/// overrides in order, and materialize the validated RunConfig.
inline RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
    json tree;
    if (path.empty()) {
        tree = default_config_tree();
    } else {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("config: cannot read " + path);
        tree = json::parse(in, nullptr, true, true);  // allow comments
    }
    check_unknown_keys(tree, default_config_tree(), "");
    for (const auto& o : overrides) apply_override(tree, o);
    RunConfig c = config_from_json(tree);
    c.validate();
    return c;
}

inline std::string canonical_dump(const RunConfig& c) { return to_json(c).dump(2) + "\n"; }

/// Sixteen hex digits identifying the resolved configuration.
inline std::string config_hash(const RunConfig& c) {
    const std::uint64_t h = fnv1a64(canonical_dump(c));
    std::ostringstream ss;
    ss << std::hex << std::setw(16) << std::setfill('0') << h;
    return ss.str();
}

}  // namespace uavpe
