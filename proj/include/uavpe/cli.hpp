// Command implementations behind the CLI front end: training plans by name,
// seeded evaluation campaigns with win/standoff/lose tables, episode JSON
// records, trajectory and reward-trace exports, and the action catalog dump.
#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "uavpe/config.hpp"
#include "uavpe/trainer.hpp"

namespace uavpe {

// ---------------------------------------------------------------------------
// Training plans
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& known_plans() {
    static const std::vector<std::string> names = {
        "basic-pursuit", "straight-pursuit", "circle-pursuit", "random-pursuit",
        "mixed-pursuit", "circle-bait",     "vs-matrix",      "coop-2v1",
        "coop-2v2",      "coop-3v2"};
    return names;
}

namespace detail {

inline ScenarioConfig one_on_one(const ScenarioConfig& base, BluePolicyKind policy, Role role,
                                 bool fixed) {
    ScenarioConfig s = base;
    s.red_count = 1;
    s.blue_count = 1;
    s.red_roles = {role};
    s.blue_policy = policy;
    s.fixed_roles = fixed;
    return s;
}

inline TrainPhase phase(const std::string& name, const ScenarioConfig& s, long long budget,
                        Role role) {
    TrainPhase p;
    p.name = name;
    p.scenario = s;
    p.budget = std::max<long long>(1, budget);
    p.training_role = role;
    return p;
}

}  // namespace detail

/// Build a named curriculum. total_steps is the whole-plan transition budget;
/// frozen maps roles to checkpoint paths for cooperative phases (roles not
/// listed keep the trainer's in-memory parameters).
inline TrainPlan make_plan(const std::string& name, const RunConfig& cfg, long long total_steps,
                           const std::map<Role, std::string>& frozen = {}) {
    if (total_steps < 1) throw std::invalid_argument("plan: total_steps must be positive");
    const ScenarioConfig& base = cfg.scenario;
    TrainPlan plan;
    plan.name = name;

    auto pursuit_1v1 = [&](BluePolicyKind p) {
        return detail::one_on_one(base, p, Role::pursuit, false);
    };

    if (name == "basic-pursuit") {
        // straight, circling and random warm-up phases, then a long mixed one
        const long long part = total_steps / 6;
        plan.phases.push_back(detail::phase(
            "straight", pursuit_1v1(BluePolicyKind::scripted_straight), part, Role::pursuit));
        plan.phases.push_back(detail::phase(
            "circle", pursuit_1v1(BluePolicyKind::scripted_circling), part, Role::pursuit));
        plan.phases.push_back(detail::phase(
            "random", pursuit_1v1(BluePolicyKind::scripted_random), part, Role::pursuit));
        TrainPhase mixed = detail::phase("mixed", pursuit_1v1(BluePolicyKind::scripted_straight),
                                         total_steps - 3 * part, Role::pursuit);
        mixed.mixed_blue = true;
        plan.phases.push_back(mixed);
    } else if (name == "straight-pursuit") {
        plan.phases.push_back(detail::phase(
            "straight", pursuit_1v1(BluePolicyKind::scripted_straight), total_steps,
            Role::pursuit));
    } else if (name == "circle-pursuit") {
        plan.phases.push_back(detail::phase(
            "circle", pursuit_1v1(BluePolicyKind::scripted_circling), total_steps, Role::pursuit));
    } else if (name == "random-pursuit") {
        plan.phases.push_back(detail::phase(
            "random", pursuit_1v1(BluePolicyKind::scripted_random), total_steps, Role::pursuit));
    } else if (name == "mixed-pursuit") {
        TrainPhase mixed = detail::phase("mixed", pursuit_1v1(BluePolicyKind::scripted_straight),
                                         total_steps, Role::pursuit);
        mixed.mixed_blue = true;
        plan.phases.push_back(mixed);
    } else if (name == "circle-bait") {
        // bait training must pin roles or the allocator would hand the lone
        // red a pursuit role
        plan.phases.push_back(detail::phase(
            "circle_bait",
            detail::one_on_one(base, BluePolicyKind::scripted_circling, Role::bait, true),
            total_steps, Role::bait));
    } else if (name == "vs-matrix") {
        plan.phases.push_back(detail::phase(
            "vs_matrix", pursuit_1v1(BluePolicyKind::maximin), total_steps, Role::pursuit));
    } else if (name == "coop-2v1") {
        ScenarioConfig s = base;
        s.red_count = 2;
        s.blue_count = 1;
        s.red_roles = {Role::pursuit, Role::pursuit};
        s.blue_policy = BluePolicyKind::maximin;
        s.fixed_roles = true;
        plan.phases.push_back(detail::phase("coop_2v1", s, total_steps, Role::pursuit));
    } else if (name == "coop-2v2" || name == "coop-3v2") {
        ScenarioConfig s = base;
        if (name == "coop-2v2") {
            s.red_count = 2;
            s.blue_count = 2;
            s.red_roles = {Role::pursuit, Role::bait};
        } else {
            s.red_count = 3;
            s.blue_count = 2;
            s.red_roles = {Role::pursuit, Role::pursuit, Role::bait};
        }
        s.blue_policy = BluePolicyKind::maximin;
        s.fixed_roles = true;
        TrainPhase p1 = detail::phase("coop_pursuit", s, total_steps / 2, Role::pursuit);
        if (auto it = frozen.find(Role::bait); it != frozen.end()) p1.frozen[Role::bait] = it->second;
        TrainPhase p2 =
            detail::phase("coop_bait", s, total_steps - total_steps / 2, Role::bait);
        if (auto it = frozen.find(Role::pursuit); it != frozen.end())
            p2.frozen[Role::pursuit] = it->second;
        plan.phases.push_back(p1);
        plan.phases.push_back(p2);
    } else {
        std::string msg = "plan: unknown plan \"" + name + "\" (known:";
        for (const auto& n : known_plans()) msg += " " + n;
        throw std::invalid_argument(msg + ")");
    }
    plan.validate();
    return plan;
}

// ---------------------------------------------------------------------------
// Training command
// ---------------------------------------------------------------------------

struct TrainArtifacts {
    TrainResult result;
    std::string out_dir;
    std::string metrics_path;
    std::string resolved_config_path;
    std::vector<std::string> final_checkpoints;
};

inline TrainArtifacts cmd_train(const RunConfig& cfg, const std::string& plan_name,
                                long long total_steps,
                                const std::map<Role, std::string>& frozen = {}) {
    cfg.validate();
    const TrainPlan plan = make_plan(plan_name, cfg, total_steps, frozen);
    std::filesystem::create_directories(cfg.output_dir);

    TrainArtifacts art;
    art.out_dir = cfg.output_dir;
    art.resolved_config_path = cfg.output_dir + "/resolved_config.json";
    {
        std::ofstream os(art.resolved_config_path, std::ios::trunc);
        if (!os) throw std::runtime_error("train: cannot write " + art.resolved_config_path);
        os << canonical_dump(cfg);
    }

    Trainer trainer(cfg.trainer_config(), cfg.physics, cfg.engagement, cfg.rewards, cfg.per,
                    cfg.net_sizes(), cfg.seed);
    art.result = trainer.train(plan, cfg.output_dir, config_hash(cfg));
    art.metrics_path = cfg.output_dir + "/metrics.csv";

    std::vector<Role> trained;
    for (const auto& p : plan.phases)
        if (std::find(trained.begin(), trained.end(), p.training_role) == trained.end())
            trained.push_back(p.training_role);
    for (Role r : trained) {
        const std::string path =
            cfg.output_dir + "/final_" + std::string(role_name(r)) + ".ckpt";
        save_checkpoint(art.result.policies.at(r), path);
        art.final_checkpoints.push_back(path);
    }
    return art;
}

// ---------------------------------------------------------------------------
// Evaluation campaign
// ---------------------------------------------------------------------------

/// Integer percentages that always sum to 100: floor everything, then hand
/// the leftover points to the largest remainders.
inline std::vector<int> integer_percentages(const std::vector<int>& counts) {
    const int total = std::accumulate(counts.begin(), counts.end(), 0);
    if (total <= 0) throw std::invalid_argument("percentages: empty campaign");
    std::vector<int> pct(counts.size());
    std::vector<std::pair<double, std::size_t>> rem;
    int assigned = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double exact = 100.0 * counts[i] / total;
        pct[i] = static_cast<int>(exact);
        assigned += pct[i];
        rem.push_back({exact - pct[i], i});
    }
    std::sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    for (int k = 0; k < 100 - assigned; ++k) pct[rem[k % rem.size()].second] += 1;
    return pct;
}

struct EvalRow {
    double limit_s = 0.0;
    int episodes = 0;
    int win = 0, standoff = 0, lose = 0;
    int win_pct = 0, standoff_pct = 0, lose_pct = 0;
};

struct EvalReport {
    std::vector<EvalRow> rows;
    std::vector<std::vector<EpisodeRecord>> records;  // per row, per episode
};

/// Greedy per-role action source built from loaded checkpoints.
struct RolePolicies {
    QNetwork pursuit;
    bool has_bait = false;
    QNetwork bait;

    RedPolicyFn policy_fn() const {
        return [this](int, Role role, const Observation& obs, int) {
            const QNetwork& net = (role == Role::bait && has_bait) ? bait : pursuit;
            return greedy_action(net, obs);
        };
    }
};

inline void check_policy_shape(const QNetwork& net, const std::string& what) {
    if (net.input_dim() != kObsDim || net.output_dim() != ManeuverCatalog::kActionCount)
        throw std::runtime_error(what + ": checkpoint shape does not match the observation and "
                                        "action interface");
}

/// Preset opponent scenarios for the evaluation tables.
inline void apply_scenario_kind(ScenarioConfig& s, const std::string& kind) {
    s.blue_policy = BluePolicyKind::maximin;
    s.fixed_roles = false;
    if (kind == "1v1") {
        s.red_count = 1;
        s.blue_count = 1;
        s.red_roles = {Role::pursuit};
    } else if (kind == "2v1") {
        s.red_count = 2;
        s.blue_count = 1;
        s.red_roles = {Role::pursuit, Role::pursuit};
    } else if (kind == "2v2") {
        s.red_count = 2;
        s.blue_count = 2;
        s.red_roles = {Role::pursuit, Role::bait};
    } else if (kind == "3v2") {
        s.red_count = 3;
        s.blue_count = 2;
        s.red_roles = {Role::pursuit, Role::pursuit, Role::bait};
    } else {
        throw std::invalid_argument("evaluate: unknown scenario kind \"" + kind +
                                    "\" (known: 1v1 2v1 2v2 3v2)");
    }
}

struct EvalOptions {
    int episodes = 100;
    std::vector<double> limits_s = {60.0, 180.0, 300.0};
    bool record_rows = false;  // keep trajectories in the records
};

/// Run the seeded campaign: the same episode seeds at every time limit, so a
/// longer limit replays the same engagement with more time on the clock.
inline EvalReport run_evaluation(const RunConfig& cfg, const RolePolicies& policies,
                                 const EvalOptions& opt) {
    if (opt.episodes < 1) throw std::invalid_argument("evaluate: need at least one episode");
    if (opt.limits_s.empty()) throw std::invalid_argument("evaluate: need at least one time limit");
    check_policy_shape(policies.pursuit, "evaluate");
    if (policies.has_bait) check_policy_shape(policies.bait, "evaluate");
    bool may_use_bait = false;
    if (cfg.scenario.fixed_roles) {
        for (Role r : cfg.scenario.red_roles) may_use_bait = may_use_bait || r == Role::bait;
    } else {
        may_use_bait = cfg.scenario.red_count > 1 && cfg.scenario.blue_count > 1;
    }
    if (may_use_bait && !policies.has_bait)
        throw std::runtime_error("evaluate: scenario can assign bait roles but no bait "
                                 "checkpoint was given");

    const RedPolicyFn fn = policies.policy_fn();
    const std::string hash = config_hash(cfg);
    EvalReport report;
    for (double limit : opt.limits_s) {
        RunConfig c = cfg;
        c.scenario.time_limit_s = limit;
        Arena arena(c.physics, c.engagement, c.rewards, c.scenario);
        EvalRow row;
        row.limit_s = limit;
        row.episodes = opt.episodes;
        std::vector<EpisodeRecord> recs;
        for (int k = 0; k < opt.episodes; ++k) {
            const std::uint64_t ep_seed = derive_seed(cfg.seed, "eval.episode", k);
            EpisodeRecord rec = arena.run_episode(fn, ep_seed, opt.record_rows);
            rec.config_hash = hash;
            switch (rec.outcome) {
                case Outcome::win: row.win++; break;
                case Outcome::lose: row.lose++; break;
                case Outcome::standoff: row.standoff++; break;
            }
            recs.push_back(std::move(rec));
        }
        const auto pct = integer_percentages({row.win, row.standoff, row.lose});
        row.win_pct = pct[0];
        row.standoff_pct = pct[1];
        row.lose_pct = pct[2];
        report.rows.push_back(row);
        report.records.push_back(std::move(recs));
    }
    return report;
}

inline std::string format_eval_table(const EvalReport& report) {
    std::ostringstream os;
    os << "time_limit   win  standoff  lose\n";
    for (const auto& r : report.rows) {
        std::ostringstream label;
        label << r.limit_s / 60.0 << " min";
        os << std::left << std::setw(12) << label.str() << std::right << std::setw(4) << r.win_pct
           << "%" << std::setw(9) << r.standoff_pct << "%" << std::setw(5) << r.lose_pct << "%\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Record serialization
// ---------------------------------------------------------------------------

inline std::string csv_num(double v) {
    std::ostringstream ss;
    ss << std::setprecision(17) << v;
    return ss.str();
}

inline json episode_to_json(const EpisodeRecord& rec, int episode_index) {
    json e;
    e["episode"] = episode_index;
    e["seed"] = rec.seed;
    e["config_hash"] = rec.config_hash;
    e["outcome"] = outcome_name(rec.outcome);
    e["duration_s"] = rec.duration_s;
    e["steps"] = rec.steps;
    e["red_return"] = rec.red_return;
    e["events"] = json::array();
    for (const auto& ev : rec.events)
        e["events"].push_back(
            {{"t", ev.t}, {"kind", ev.kind}, {"subject", ev.subject}, {"object", ev.object}});
    return e;
}

inline void write_episode_json(const std::string& path, const std::vector<EpisodeRecord>& recs) {
    json arr = json::array();
    for (std::size_t k = 0; k < recs.size(); ++k)
        arr.push_back(episode_to_json(recs[k], static_cast<int>(k)));
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("export: cannot write " + path);
    os << arr.dump(2) << "\n";
}

inline void write_trajectory_csv(const std::string& path, const EpisodeRecord& rec) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("export: cannot write " + path);
    os << "t,side,id,role,x,y,z,v,gamma,psi,alive\n";
    for (const auto& r : rec.trajectory) {
        os << csv_num(r.t) << ',' << r.side << ',' << r.id << ',' << role_name(r.role) << ','
           << csv_num(r.x) << ',' << csv_num(r.y) << ',' << csv_num(r.z) << ',' << csv_num(r.v)
           << ',' << csv_num(r.gamma) << ',' << csv_num(r.psi) << ',' << (r.alive ? 1 : 0)
           << '\n';
    }
}

inline void write_reward_trace_csv(const std::string& path, const EpisodeRecord& rec) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("export: cannot write " + path);
    os << "t,uav_id,pursuit_score\n";
    for (const auto& r : rec.reward_trace)
        os << csv_num(r.t) << ',' << r.red_id << ',' << csv_num(r.pursuit_score) << '\n';
}

inline void write_events_csv(const std::string& path, const EpisodeRecord& rec) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("export: cannot write " + path);
    os << "t,kind,subject,object\n";
    for (const auto& ev : rec.events)
        os << csv_num(ev.t) << ',' << ev.kind << ',' << ev.subject << ',' << ev.object << '\n';
}

/// Single-episode export: run one seeded episode with row recording on and
/// emit the trajectory, reward-trace and event CSVs plus the episode JSON.
inline std::vector<std::string> cmd_export(const RunConfig& cfg, const RolePolicies& policies,
                                           std::uint64_t episode_seed, const std::string& out_dir,
                                           const std::string& format) {
    if (format != "csv")
        throw std::invalid_argument("export: unknown format \"" + format + "\" (known: csv)");
    check_policy_shape(policies.pursuit, "export");
    Arena arena(cfg.physics, cfg.engagement, cfg.rewards, cfg.scenario);
    EpisodeRecord rec = arena.run_episode(policies.policy_fn(), episode_seed, true);
    rec.config_hash = config_hash(cfg);
    std::filesystem::create_directories(out_dir);
    const std::vector<std::string> paths = {
        out_dir + "/trajectory.csv", out_dir + "/reward_trace.csv", out_dir + "/events.csv",
        out_dir + "/episode.json"};
    write_trajectory_csv(paths[0], rec);
    write_reward_trace_csv(paths[1], rec);
    write_events_csv(paths[2], rec);
    write_episode_json(paths[3], {rec});
    return paths;
}

// ---------------------------------------------------------------------------
// Action catalog dump
// ---------------------------------------------------------------------------

inline std::string action_catalog_table(const ManeuverCatalog& catalog) {
    std::ostringstream os;
    os << std::left << std::setw(6) << "index" << std::setw(16) << "name" << std::setw(12)
       << "n_x" << std::setw(22) << "n_z" << "phi_deg\n";
    for (std::size_t i = 0; i < catalog.entries.size(); ++i) {
        const auto& e = catalog.entries[i];
        os << std::left << std::setw(6) << i << std::setw(16) << e.name << std::setw(12)
           << e.nx_recipe() << std::setw(22) << e.nz_recipe() << rad2deg(e.phi) << "\n";
    }
    return os.str();
}

}  // namespace uavpe
