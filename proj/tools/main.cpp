// CLI front end: train / evaluate / export / print-action-catalog /
// validate-config, all driven by one JSON config with dotted-path overrides.
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uavpe/cli.hpp"

namespace {

using namespace uavpe;

std::map<Role, std::string> parse_frozen(const std::string& spec) {
    std::map<Role, std::string> out;
    if (spec.empty()) return out;
    std::stringstream ss(spec);
    std::string item;
    int position = 0;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq != std::string::npos) {
            out[role_from_name(item.substr(0, eq))] = item.substr(eq + 1);
        } else {
            // bare paths assign positionally: pursuit first, bait second
            if (position > 1) throw std::invalid_argument("--frozen: too many bare paths");
            out[position == 0 ? Role::pursuit : Role::bait] = item;
        }
        ++position;
    }
    return out;
}

std::string hidden_override(const std::string& net) {
    std::string arr = "[";
    std::stringstream ss(net);
    std::string item;
    bool first = true;
    while (std::getline(ss, item, ',')) {
        if (!first) arr += ",";
        arr += item;
        first = false;
    }
    return "network.hidden=" + arr + "]";
}

RolePolicies load_policies(const std::string& pursuit_path, const std::string& bait_path) {
    RolePolicies p;
    p.pursuit = load_checkpoint(pursuit_path);
    if (!bait_path.empty()) {
        p.bait = load_checkpoint(bait_path);
        p.has_bait = true;
    }
    return p;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-UAV pursuit-evasion simulation and reinforcement-learning toolkit"};
    app.require_subcommand(1);

    // train ------------------------------------------------------------
    auto* train = app.add_subcommand("train", "Run a training plan");
    std::string tr_config, tr_plan = "basic-pursuit", tr_net, tr_frozen, tr_out;
    std::vector<std::string> tr_overrides;
    long long tr_steps = 100000;
    int tr_workers = -1;
    bool tr_deterministic = false;
    std::uint64_t tr_seed = 0;
    bool tr_seed_set = false;
    train->add_option("--config", tr_config, "Config file (JSON); defaults used when omitted");
    train->add_option("--override", tr_overrides, "Dotted-path override key=value")
        ->take_all();
    train->add_option("--plan", tr_plan, "Training plan name");
    train->add_option("--steps", tr_steps, "Total transition budget for the plan");
    train->add_option("--net", tr_net, "Hidden layer widths, e.g. 64,64");
    train->add_option("--frozen", tr_frozen,
                      "Frozen role checkpoints: path[,path] or role=path[,role=path]");
    train->add_option("--workers", tr_workers, "Environment worker count");
    train->add_flag("--deterministic", tr_deterministic, "Single-threaded reproducible mode");
    train->add_option("--seed", tr_seed, "Root seed")->each([&](const std::string&) {
        tr_seed_set = true;
    });
    train->add_option("--out", tr_out, "Output directory");

    // evaluate ---------------------------------------------------------
    auto* eval = app.add_subcommand("evaluate", "Run a seeded evaluation campaign");
    std::string ev_config, ev_ckpt, ev_bait, ev_scenario, ev_out;
    std::vector<std::string> ev_overrides;
    std::vector<double> ev_limits = {60.0, 180.0, 300.0};
    int ev_episodes = 100;
    std::uint64_t ev_seed = 0;
    bool ev_seed_set = false;
    eval->add_option("--config", ev_config, "Config file (JSON)");
    eval->add_option("--override", ev_overrides, "Dotted-path override key=value")->take_all();
    eval->add_option("--ckpt", ev_ckpt, "Pursuit checkpoint")->required();
    eval->add_option("--bait-ckpt", ev_bait, "Bait checkpoint (scenarios with bait roles)");
    eval->add_option("--scenario", ev_scenario, "Preset opponent scenario: 1v1 2v1 2v2 3v2");
    eval->add_option("--episodes", ev_episodes, "Episodes per time limit");
    eval->add_option("--limits", ev_limits, "Time limits in seconds")->expected(-1);
    eval->add_option("--seed", ev_seed, "Root seed")->each([&](const std::string&) {
        ev_seed_set = true;
    });
    eval->add_option("--out", ev_out, "Directory for episode JSON records (optional)");

    // export -----------------------------------------------------------
    auto* exp = app.add_subcommand("export", "Run one episode and export its records");
    std::string ex_config, ex_ckpt, ex_bait, ex_scenario, ex_out, ex_format = "csv";
    std::vector<std::string> ex_overrides;
    std::uint64_t ex_seed = 0;
    bool ex_seed_set = false;
    int ex_episode = 0;
    exp->add_option("--config", ex_config, "Config file (JSON)");
    exp->add_option("--override", ex_overrides, "Dotted-path override key=value")->take_all();
    exp->add_option("--ckpt", ex_ckpt, "Pursuit checkpoint")->required();
    exp->add_option("--bait-ckpt", ex_bait, "Bait checkpoint");
    exp->add_option("--scenario", ex_scenario, "Preset opponent scenario: 1v1 2v1 2v2 3v2");
    exp->add_option("--episode", ex_episode, "Campaign episode index to replay");
    exp->add_option("--seed", ex_seed, "Root seed")->each([&](const std::string&) {
        ex_seed_set = true;
    });
    exp->add_option("--out", ex_out, "Output directory")->required();
    exp->add_option("--format", ex_format, "Export format (csv)");

    // print-action-catalog ----------------------------------------------
    auto* cat = app.add_subcommand("print-action-catalog", "Dump the maneuver catalog table");

    // validate-config ---------------------------------------------------
    auto* val = app.add_subcommand("validate-config", "Check a config and print its resolved form");
    std::string va_config;
    std::vector<std::string> va_overrides;
    val->add_option("--config", va_config, "Config file (JSON)");
    val->add_option("--override", va_overrides, "Dotted-path override key=value")->take_all();

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) {
            if (!tr_net.empty()) tr_overrides.push_back(hidden_override(tr_net));
            if (tr_workers > 0)
                tr_overrides.push_back("trainer.workers=" + std::to_string(tr_workers));
            if (tr_deterministic) tr_overrides.push_back("trainer.deterministic=true");
            if (tr_seed_set) tr_overrides.push_back("seed=" + std::to_string(tr_seed));
            if (!tr_out.empty()) tr_overrides.push_back("output_dir=" + tr_out);
            const RunConfig cfg = load_config(tr_config, tr_overrides);
            const auto art = cmd_train(cfg, tr_plan, tr_steps, parse_frozen(tr_frozen));
            std::cout << "plan " << tr_plan << ": " << art.result.collected
                      << " transitions, " << art.result.train_steps << " train steps, "
                      << art.result.episodes << " episodes\n";
            std::cout << "metrics: " << art.metrics_path << "\n";
            for (const auto& p : art.final_checkpoints) std::cout << "checkpoint: " << p << "\n";
            return 0;
        }
        if (eval->parsed()) {
            if (ev_seed_set) ev_overrides.push_back("seed=" + std::to_string(ev_seed));
            RunConfig cfg = load_config(ev_config, ev_overrides);
            if (!ev_scenario.empty()) apply_scenario_kind(cfg.scenario, ev_scenario);
            cfg.validate();
            EvalOptions opt;
            opt.episodes = ev_episodes;
            opt.limits_s = ev_limits;
            const EvalReport report = run_evaluation(cfg, load_policies(ev_ckpt, ev_bait), opt);
            std::cout << format_eval_table(report);
            if (!ev_out.empty()) {
                std::filesystem::create_directories(ev_out);
                for (std::size_t i = 0; i < report.rows.size(); ++i) {
                    std::ostringstream name;
                    name << ev_out << "/episodes_" << report.rows[i].limit_s << "s.json";
                    write_episode_json(name.str(), report.records[i]);
                    std::cout << "records: " << name.str() << "\n";
                }
            }
            return 0;
        }
        if (exp->parsed()) {
            if (ex_seed_set) ex_overrides.push_back("seed=" + std::to_string(ex_seed));
            RunConfig cfg = load_config(ex_config, ex_overrides);
            if (!ex_scenario.empty()) apply_scenario_kind(cfg.scenario, ex_scenario);
            cfg.validate();
            const std::uint64_t ep_seed = derive_seed(cfg.seed, "eval.episode", ex_episode);
            const auto paths =
                cmd_export(cfg, load_policies(ex_ckpt, ex_bait), ep_seed, ex_out, ex_format);
            for (const auto& p : paths) std::cout << "wrote: " << p << "\n";
            return 0;
        }
        if (cat->parsed()) {
            std::cout << action_catalog_table(ManeuverCatalog::standard());
            return 0;
        }
        if (val->parsed()) {
            const RunConfig cfg = load_config(va_config, va_overrides);
            std::cout << canonical_dump(cfg);
            std::cout << "config_hash: " << config_hash(cfg) << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
