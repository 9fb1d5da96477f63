#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "evade/config.hpp"
#include "evade/env.hpp"
#include "evade/policies.hpp"
#include "evade/td3.hpp"
#include "evade/version.hpp"

namespace evade {

/// Seed-index bases keeping training, periodic-eval and standalone-eval
/// episode streams disjoint.
inline constexpr std::uint64_t kTrainSeedBase = 0;
inline constexpr std::uint64_t kPeriodicEvalSeedBase = 1ull << 40;

/// Exploration-episode schedule. White-noise dither around an untrained actor
/// is a diffusive walk that almost never crosses the target disk, so the
/// critics get no reach events to anchor the value of approaching it. A fixed
/// share of episodes therefore runs a scripted behavior instead of the actor:
/// mostly a dithered straight-to-target guide (reach corridors), occasionally
/// persistent random legs (action-range coverage). The share is constant so
/// the behavior mixture is stationary and the training-return curve drifts
/// only with learner competence; the learner trains off-policy on everything.
inline constexpr double kExploreShare = 0.55;
inline constexpr double kGuideFrac = 0.7; // guide vs leg split within that share
inline constexpr double kGuideNoise = 0.15;
inline constexpr int kLegSteps = 100; // steps a random leg heading is held
inline constexpr std::uint64_t kStandaloneEvalSeedBase = 1ull << 41;

struct EpisodeStats {
    int index = 0; // 1-based
    std::uint64_t seed = 0;
    int steps = 0;
    Outcome outcome = Outcome::Timeout;
    bool safe = true;
    int corrected_steps = 0;
    int infeasible_steps = 0;
    double deviation_sum = 0.0;
    double min_h = 0.0;
    double total_reward = 0.0;
};

inline EpisodeStats stats_from_record(int index, const EpisodeRecord& record) {
    EpisodeStats s;
    s.index = index;
    s.seed = record.seed;
    s.steps = static_cast<int>(record.rows.size());
    s.outcome = record.outcome;
    s.safe = record.safe_episode;
    s.corrected_steps = record.corrected_steps;
    s.infeasible_steps = record.infeasible_steps;
    for (const auto& row : record.rows) s.deviation_sum += row.deviation;
    s.min_h = record.min_h();
    s.total_reward = record.total_reward;
    return s;
}

struct TrainOutput {
    std::vector<EpisodeStats> episodes;
    struct EvalRow {
        int after_episode = 0;
        EpisodeStats stats;
    };
    std::vector<EvalRow> evals;
    int safe_episodes = 0;
    long long total_steps = 0;
    long long corrected_steps = 0;
    long long infeasible_steps = 0;
    double min_h = std::numeric_limits<double>::infinity();
    std::vector<double> corrected_deviations;
    std::filesystem::path final_checkpoint;
};

struct EvalOutput {
    std::vector<EpisodeStats> episodes;
    int safe_episodes = 0;
    double reached_rate = 0.0;
    double bonus_rate = 0.0; // episodes ending on the terminal goal reward
    double mean_return = 0.0;
};

inline EvalOutput evaluate_policy(const RunConfig& cfg, Td3Agent& agent, int n_episodes,
                                  std::uint64_t seed_base) {
    EvalOutput out;
    int reached = 0;
    int bonus = 0;
    double return_sum = 0.0;
    for (int i = 0; i < n_episodes; ++i) {
        EpisodeConfig ecfg = cfg.episode;
        ecfg.seed = stream_seed(cfg.seed, Stream::Environment,
                                seed_base + static_cast<std::uint64_t>(i));
        const EpisodeRecord record = run_episode(ecfg, AgentPolicy{&agent, true});
        EpisodeStats s = stats_from_record(i + 1, record);
        out.safe_episodes += s.safe ? 1 : 0;
        reached += s.outcome == Outcome::ReachedTarget ? 1 : 0;
        if (!record.rows.empty() && record.rows.back().reward == kReachedReward) ++bonus;
        return_sum += s.total_reward;
        out.episodes.push_back(s);
    }
    if (n_episodes > 0) {
        out.reached_rate = static_cast<double>(reached) / n_episodes;
        out.bonus_rate = static_cast<double>(bonus) / n_episodes;
        out.mean_return = return_sum / n_episodes;
    }
    return out;
}

namespace detail {

inline std::string episode_csv_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "episode_%06d.csv", index);
    return buf;
}

inline void write_reward_log(const std::filesystem::path& path,
                             const std::vector<EpisodeStats>& episodes) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << "episode,steps,outcome,safe,corrected_steps,infeasible_steps,deviation_sum,min_h,"
          "total_reward\n";
    for (const auto& s : episodes) {
        os << s.index << ',' << s.steps << ',' << to_string(s.outcome) << ',' << (s.safe ? 1 : 0)
           << ',' << s.corrected_steps << ',' << s.infeasible_steps << ','
           << format_double(s.deviation_sum) << ',' << format_double(s.min_h) << ','
           << format_double(s.total_reward) << "\n";
    }
}

inline void write_eval_log(const std::filesystem::path& path,
                           const std::vector<TrainOutput::EvalRow>& evals) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << "after_episode,eval_index,seed,steps,outcome,safe,total_reward\n";
    for (const auto& row : evals) {
        os << row.after_episode << ',' << row.stats.index << ',' << row.stats.seed << ','
           << row.stats.steps << ',' << to_string(row.stats.outcome) << ','
           << (row.stats.safe ? 1 : 0) << ',' << format_double(row.stats.total_reward) << "\n";
    }
}

inline double median_of(std::vector<double> values) {
    if (values.empty()) return 0.0;
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                     values.end());
    double m = values[mid];
    if (values.size() % 2 == 0) {
        std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid) - 1,
                         values.begin() + static_cast<std::ptrdiff_t>(mid));
        m = 0.5 * (m + values[mid - 1]);
    }
    return m;
}

} // namespace detail

inline nlohmann::json train_summary_json(const RunConfig& cfg, const TrainOutput& out) {
    nlohmann::json counts;
    for (Outcome o : {Outcome::ReachedTarget, Outcome::Captured, Outcome::Collided,
                      Outcome::Timeout}) {
        counts[to_string(o)] = 0;
    }
    int reached = 0;
    for (const auto& s : out.episodes) {
        counts[to_string(s.outcome)] = counts[to_string(s.outcome)].get<int>() + 1;
        reached += s.outcome == Outcome::ReachedTarget ? 1 : 0;
    }
    const int n = static_cast<int>(out.episodes.size());
    const double dev_mean =
        out.corrected_deviations.empty()
            ? 0.0
            : std::accumulate(out.corrected_deviations.begin(), out.corrected_deviations.end(),
                              0.0) /
                  static_cast<double>(out.corrected_deviations.size());
    nlohmann::json j;
    j["run_id"] = cfg.run_id;
    j["seed"] = cfg.seed;
    j["version"] = kVersion;
    j["policy_config_hash"] = config_hash(cfg.td3);
    j["episodes"] = n;
    j["safe_episodes"] = out.safe_episodes;
    j["safety_ratio"] = n > 0 ? static_cast<double>(out.safe_episodes) / n : 0.0;
    j["outcome_counts"] = counts;
    j["reached_rate"] = n > 0 ? static_cast<double>(reached) / n : 0.0;
    j["total_steps"] = out.total_steps;
    j["corrected_steps"] = out.corrected_steps;
    j["infeasible_steps"] = out.infeasible_steps;
    j["deviation_mean_rad"] = dev_mean;
    j["deviation_median_rad"] = detail::median_of(out.corrected_deviations);
    j["min_h"] = out.min_h;
    j["final_checkpoint"] = "checkpoint_final.ckpt";
    return j;
}

/// Runs the full training loop and writes the run directory: resolved config,
/// per-episode trajectory CSVs, reward and eval logs, checkpoints, summary.
/// Identical config and seed reproduce every artifact byte for byte.
inline TrainOutput train_run(const RunConfig& cfg, const std::filesystem::path& out_dir,
                             std::ostream* progress = nullptr) {
    const auto items = validate_items(cfg);
    if (!items.empty()) throw ConfigError(items);
    std::filesystem::create_directories(out_dir / "episodes");
    save_run_config((out_dir / "config.json").string(), cfg);

    Td3Agent agent(cfg.td3, cfg.seed);
    TrainOutput out;
    long long global_step = 0;
    // Updates wait for warmup_steps of data so early bootstrap targets never
    // query the critics far outside the data; behavior is the same mixture
    // throughout, so collection is stationary from the first episode.
    std::mt19937_64 explore_rng = make_rng(cfg.seed, Stream::Exploration, 1ull << 32);
    std::uniform_real_distribution<double> leg_raw(-1.0, 1.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::normal_distribution<double> guide_noise(0.0, kGuideNoise);
    double leg_heading = 0.0;
    int leg_left = 0; // steps left on the current exploration leg

    for (int ep = 1; ep <= cfg.training.episodes; ++ep) {
        EpisodeConfig ecfg = cfg.episode;
        ecfg.seed = stream_seed(cfg.seed, Stream::Environment,
                                kTrainSeedBase + static_cast<std::uint64_t>(ep));
        EpisodeRecord record;
        record.seed = ecfg.seed;
        WorldState w = reset(ecfg);
        Observation obs = observe(w);
        const bool scripted = u01(explore_rng) < kExploreShare;
        const bool guided = u01(explore_rng) < kGuideFrac;
        leg_left = 0;
        while (true) {
            const bool warming = global_step < cfg.training.warmup_steps;
            PolicyAction a{};
            if (scripted && guided) {
                const Vec2 to_target = w.target - position(w.evader);
                const double ideal = std::atan2(to_target.y, to_target.x);
                a.raw = std::clamp(raw_from_heading(ideal) + guide_noise(explore_rng),
                                   -1.0, 1.0);
            } else if (scripted) {
                if (leg_left == 0) {
                    leg_heading = leg_raw(explore_rng);
                    leg_left = kLegSteps;
                }
                --leg_left;
                a.raw = leg_heading;
            } else {
                a = agent.act(obs, false);
            }
            StepResult r = step_world(w, EvaderAction{heading_from_raw(a.raw)}, ecfg);
            const Observation next = observe(r.world);
            Transition t;
            t.obs = obs;
            t.action = raw_from_heading(r.row.safe_heading);
            t.reward = r.reward;
            t.next_obs = next;
            t.done = r.done && r.outcome != Outcome::Timeout;
            agent.buffer().push(t);
            ++global_step;
            if (!warming && global_step % cfg.training.update_every_steps == 0) agent.update();

            record.total_reward += r.reward;
            if (r.row.corrected) {
                ++record.corrected_steps;
                out.corrected_deviations.push_back(r.row.deviation);
            }
            if (!r.row.feasible) ++record.infeasible_steps;
            record.rows.push_back(std::move(r.row));
            obs = next;
            w = r.world;
            if (r.done) {
                record.outcome = r.outcome;
                break;
            }
        }
        record.safe_episode = record.min_h() >= 0.0;

        {
            std::ofstream os(out_dir / "episodes" / detail::episode_csv_name(ep));
            if (!os) throw std::runtime_error("cannot write episode CSV");
            write_episode_csv(os, record);
        }
        const EpisodeStats stats = stats_from_record(ep, record);
        out.episodes.push_back(stats);
        out.safe_episodes += stats.safe ? 1 : 0;
        out.total_steps += stats.steps;
        out.corrected_steps += stats.corrected_steps;
        out.infeasible_steps += stats.infeasible_steps;
        out.min_h = std::min(out.min_h, stats.min_h);

        if (progress && (ep % 10 == 0 || ep == cfg.training.episodes)) {
            *progress << "episode " << ep << "/" << cfg.training.episodes << " outcome="
                      << to_string(stats.outcome) << " return=" << stats.total_reward
                      << " safe=" << (stats.safe ? "yes" : "no") << std::endl;
        }

        if (cfg.training.eval_every_episodes > 0 && ep % cfg.training.eval_every_episodes == 0) {
            const EvalOutput eval = evaluate_policy(
                cfg, agent, cfg.training.eval_episodes,
                kPeriodicEvalSeedBase + static_cast<std::uint64_t>(out.evals.size()) *
                                            static_cast<std::uint64_t>(cfg.training.eval_episodes));
            for (const auto& s : eval.episodes) out.evals.push_back({ep, s});
        }
        if (cfg.training.checkpoint_every_episodes > 0 &&
            ep % cfg.training.checkpoint_every_episodes == 0) {
            char name[48];
            std::snprintf(name, sizeof(name), "checkpoint_ep%06d.ckpt", ep);
            agent.save_file((out_dir / name).string());
        }
    }

    out.final_checkpoint = out_dir / "checkpoint_final.ckpt";
    agent.save_file(out.final_checkpoint.string());
    detail::write_reward_log(out_dir / "reward_log.csv", out.episodes);
    detail::write_eval_log(out_dir / "eval_log.csv", out.evals);
    {
        std::ofstream os(out_dir / "summary.json");
        if (!os) throw std::runtime_error("cannot write summary.json");
        os << train_summary_json(cfg, out).dump(2) << "\n";
    }
    return out;
}

} // namespace evade
