#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "evade/evade.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

evade::RunConfig load_config(const std::string& path, const std::optional<std::uint64_t>& seed,
                             const std::string& shield_override) {
    evade::RunConfig cfg = evade::load_run_config(path);
    if (seed) cfg.seed = *seed;
    if (shield_override == "on") cfg.episode.shield_on = true;
    if (shield_override == "off") cfg.episode.shield_on = false;
    return cfg;
}

int cmd_train(const std::string& config_path, const std::optional<std::uint64_t>& seed,
              const std::string& shield_override, const std::string& out_dir) {
    const evade::RunConfig cfg = load_config(config_path, seed, shield_override);
    const evade::TrainOutput out = evade::train_run(cfg, out_dir, &std::cout);
    std::cout << "run directory: " << out_dir << "\n";
    std::cout << "episodes: " << out.episodes.size() << ", safe: " << out.safe_episodes
              << ", infeasible filter steps: " << out.infeasible_steps << "\n";
    return kExitOk;
}

int cmd_simulate(const std::string& config_path, const std::optional<std::uint64_t>& seed,
                 const std::string& shield_override, const std::string& checkpoint,
                 const std::string& builtin, const std::string& out_path) {
    evade::RunConfig cfg = load_config(config_path, seed, shield_override);
    evade::EpisodeConfig ecfg = cfg.episode;
    ecfg.seed = cfg.seed;

    evade::EpisodeRecord record;
    if (!checkpoint.empty()) {
        evade::Td3Agent agent(cfg.td3, cfg.seed);
        agent.load_file(checkpoint);
        record = evade::run_episode(ecfg, evade::AgentPolicy{&agent, true});
    } else if (builtin == "straight-to-target") {
        record = evade::run_episode(ecfg, evade::StraightToTargetPolicy{});
    } else if (builtin == "random") {
        record = evade::run_episode(ecfg, evade::RandomPolicy{cfg.seed});
    } else {
        throw evade::ConfigError({"policy: expected 'straight-to-target' or 'random', got '" +
                                  builtin + "'"});
    }

    std::ofstream os(out_path);
    if (!os) throw std::runtime_error("cannot write " + out_path);
    evade::write_episode_csv(os, record);
    std::cout << "outcome: " << evade::to_string(record.outcome)
              << ", steps: " << record.rows.size()
              << ", safe: " << (record.safe_episode ? "yes" : "no")
              << ", corrected steps: " << record.corrected_steps
              << ", total reward: " << record.total_reward << "\n";
    std::cout << "trajectory: " << out_path << "\n";
    return kExitOk;
}

int cmd_evaluate(const std::string& config_path, const std::optional<std::uint64_t>& seed,
                 const std::string& shield_override, const std::string& checkpoint, int episodes,
                 const std::string& out_dir) {
    evade::RunConfig cfg = load_config(config_path, seed, shield_override);
    evade::Td3Agent agent(cfg.td3, cfg.seed);
    agent.load_file(checkpoint);
    const evade::EvalOutput out =
        evade::evaluate_policy(cfg, agent, episodes, evade::kStandaloneEvalSeedBase);

    std::filesystem::create_directories(out_dir);
    {
        std::ofstream os(std::filesystem::path(out_dir) / "eval_episodes.csv");
        if (!os) throw std::runtime_error("cannot write eval_episodes.csv");
        os << "episode,seed,steps,outcome,safe,corrected_steps,infeasible_steps,min_h,"
              "total_reward\n";
        for (const auto& s : out.episodes) {
            os << s.index << ',' << s.seed << ',' << s.steps << ',' << evade::to_string(s.outcome)
               << ',' << (s.safe ? 1 : 0) << ',' << s.corrected_steps << ',' << s.infeasible_steps
               << ',' << evade::detail::format_double(s.min_h) << ','
               << evade::detail::format_double(s.total_reward) << "\n";
        }
    }
    {
        nlohmann::json j;
        j["episodes"] = out.episodes.size();
        j["safe_episodes"] = out.safe_episodes;
        j["reached_rate"] = out.reached_rate;
        j["bonus_rate"] = out.bonus_rate;
        j["mean_return"] = out.mean_return;
        std::ofstream os(std::filesystem::path(out_dir) / "eval_summary.json");
        if (!os) throw std::runtime_error("cannot write eval_summary.json");
        os << j.dump(2) << "\n";
    }
    std::cout << "eval episodes: " << out.episodes.size() << ", safe: " << out.safe_episodes
              << ", reached-target rate: " << evade::format_percent(out.reached_rate)
              << ", mean return: " << out.mean_return << "\n";
    return kExitOk;
}

int cmd_report(const std::string& run_dir, bool as_json) {
    const evade::RunReport report = evade::build_report(run_dir);
    if (as_json) {
        std::cout << evade::report_to_json(report).dump(2) << "\n";
    } else {
        evade::print_report_text(std::cout, report);
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pursuit-evasion trainer with a control-barrier safety shield"};
    app.set_version_flag("--version", evade::kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "run";
    std::string out_path = "episode.csv";
    std::string checkpoint;
    std::string builtin = "straight-to-target";
    std::string run_dir;
    std::string shield_override;
    std::optional<std::uint64_t> seed;
    int episodes = 50;
    bool as_json = false;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        if (needs_config) {
            sub->add_option("--config", config_path, "run config (JSON)")->required();
        }
        sub->add_option("--seed", seed, "override the config seed");
        sub->add_option("--shield", shield_override, "override the shield flag")
            ->check(CLI::IsMember({"on", "off"}));
    };

    CLI::App* train = app.add_subcommand("train", "run the training loop");
    add_common(train, true);
    train->add_option("--output", out_dir, "run directory to create");

    CLI::App* simulate = app.add_subcommand("simulate", "roll out one episode to CSV");
    add_common(simulate, true);
    simulate->add_option("--checkpoint", checkpoint, "policy checkpoint to load");
    simulate->add_option("--policy", builtin, "builtin policy: straight-to-target or random");
    simulate->add_option("--output", out_path, "trajectory CSV path");

    CLI::App* evaluate = app.add_subcommand("evaluate", "deterministic policy evaluation");
    add_common(evaluate, true);
    evaluate->add_option("--checkpoint", checkpoint, "policy checkpoint to load")->required();
    evaluate->add_option("--episodes", episodes, "number of evaluation episodes")
        ->check(CLI::PositiveNumber);
    evaluate->add_option("--output", out_dir, "directory for evaluation artifacts");

    CLI::App* report = app.add_subcommand("report", "summarize a run directory");
    report->add_option("--run", run_dir, "run directory to read")->required();
    report->add_flag("--json", as_json, "emit JSON instead of text");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (train->parsed()) return cmd_train(config_path, seed, shield_override, out_dir);
        if (simulate->parsed()) {
            return cmd_simulate(config_path, seed, shield_override, checkpoint, builtin, out_path);
        }
        if (evaluate->parsed()) {
            return cmd_evaluate(config_path, seed, shield_override, checkpoint, episodes, out_dir);
        }
        if (report->parsed()) return cmd_report(run_dir, as_json);
    } catch (const evade::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    } catch (const evade::MissingArtifacts& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    } catch (const evade::CheckpointMismatch& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitValidation;
}
