#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "evade/env.hpp"
#include "evade/td3.hpp"

namespace evade {

/// Carries every problem found in a config so the caller can print them all.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> items)
        : std::runtime_error(join(items)), items_(std::move(items)) {}
    const std::vector<std::string>& items() const { return items_; }

private:
    static std::string join(const std::vector<std::string>& items) {
        std::string s = "invalid config:";
        for (const auto& item : items) s += "\n  - " + item;
        return s;
    }
    std::vector<std::string> items_;
};

struct TrainingConfig {
    int episodes = 150;
    int warmup_steps = 0;              // uniform-random action steps before updates
    int update_every_steps = 1;        // gradient update cadence in env steps
    int eval_every_episodes = 10;      // 0 disables periodic evaluation
    int eval_episodes = 5;
    int checkpoint_every_episodes = 0; // 0 keeps only the final checkpoint
};

struct RunConfig {
    std::string run_id = "run";
    std::uint64_t seed = 0;
    EpisodeConfig episode;
    Td3Config td3;
    TrainingConfig training;
};

namespace detail {

class JsonReader {
public:
    explicit JsonReader(std::vector<std::string>& errors) : errors_(errors) {}

    void expect_keys(const nlohmann::json& obj, const std::string& path,
                     std::initializer_list<const char*> allowed) {
        if (!obj.is_object()) {
            errors_.push_back(path + ": expected an object");
            return;
        }
        for (const auto& [key, value] : obj.items()) {
            bool ok = false;
            for (const char* a : allowed) ok = ok || key == a;
            if (!ok) errors_.push_back(path + ": unknown key '" + key + "'");
        }
    }

    template <typename T>
    void number(const nlohmann::json& obj, const char* key, const std::string& path, T& out) {
        if (!obj.is_object() || !obj.contains(key)) return;
        const auto& v = obj.at(key);
        if (!v.is_number()) {
            errors_.push_back(path + "." + key + ": expected a number");
            return;
        }
        out = v.get<T>();
    }

    void boolean(const nlohmann::json& obj, const char* key, const std::string& path, bool& out) {
        if (!obj.is_object() || !obj.contains(key)) return;
        const auto& v = obj.at(key);
        if (!v.is_boolean()) {
            errors_.push_back(path + "." + key + ": expected a boolean");
            return;
        }
        out = v.get<bool>();
    }

    void text(const nlohmann::json& obj, const char* key, const std::string& path,
              std::string& out) {
        if (!obj.is_object() || !obj.contains(key)) return;
        const auto& v = obj.at(key);
        if (!v.is_string()) {
            errors_.push_back(path + "." + key + ": expected a string");
            return;
        }
        out = v.get<std::string>();
    }

private:
    std::vector<std::string>& errors_;
};

} // namespace detail

inline std::vector<std::string> validate_items(const RunConfig& cfg) {
    std::vector<std::string> items;
    auto check = [&](bool ok, const std::string& msg) {
        if (!ok) items.push_back(msg);
    };
    check(!cfg.run_id.empty(), "run_id: must be non-empty");
    check(cfg.episode.dt > 0.0 && std::isfinite(cfg.episode.dt), "dt_s: must be finite and > 0");
    check(cfg.episode.max_steps >= 1, "max_steps: must be >= 1");
    check(cfg.episode.critical_distance > 0.0, "critical_distance_m: must be > 0");
    check(cfg.episode.target_retries >= 1, "target_retries: must be >= 1");
    check(cfg.episode.target_region.x_min <= cfg.episode.target_region.x_max,
          "target.region: x_min_m must be <= x_max_m");
    check(cfg.episode.target_region.y_min <= cfg.episode.target_region.y_max,
          "target.region: y_min_m must be <= y_max_m");
    check(cfg.episode.or_params.speed > 0.0, "evader.speed_m_per_s: must be > 0");
    check(cfg.episode.ddr_params.speed > 0.0, "pursuer.speed_m_per_s: must be > 0");
    check(cfg.episode.ddr_params.half_axle > 0.0, "pursuer.half_axle_m: must be > 0");
    check(cfg.episode.ddr_params.wheel_limit > 0.0, "pursuer.wheel_limit_m_per_s: must be > 0");
    check(cfg.episode.ddr_params.speed <= cfg.episode.ddr_params.wheel_limit,
          "pursuer.speed_m_per_s: straight drive needs speed <= wheel_limit_m_per_s");
    check(cfg.episode.pursuit.angle_tolerance > 0.0, "pursuer.angle_tolerance_rad: must be > 0");
    check(cfg.episode.pursuit.angular_gain > 0.0, "pursuer.angular_gain: must be > 0");
    check(cfg.episode.pursuit.standoff >= 0.0, "pursuer.standoff_m: must be >= 0");
    check(cfg.episode.shield.gamma_oc > 0.0, "shield.gamma_oc_per_s: must be > 0");
    check(cfg.episode.shield.gamma_pv > 0.0, "shield.gamma_pv_per_s: must be > 0");
    check(cfg.episode.shield.d_oc > 0.0, "shield.d_oc_m: must be > 0");
    check(cfg.episode.shield.d_pv > 0.0, "shield.d_pv_m: must be > 0");
    for (std::size_t i = 0; i < cfg.episode.obstacles.size(); ++i) {
        const auto& c = cfg.episode.obstacles[i];
        check(std::isfinite(c.x) && std::isfinite(c.y) && std::isfinite(c.vx) &&
                  std::isfinite(c.vy),
              "obstacles[" + std::to_string(i) + "]: all fields must be finite");
    }
    check(cfg.td3.actor_lr > 0.0, "td3.actor_lr: must be > 0");
    check(cfg.td3.critic_lr > 0.0, "td3.critic_lr: must be > 0");
    check(cfg.td3.discount > 0.0 && cfg.td3.discount <= 1.0, "td3.discount: must be in (0, 1]");
    check(cfg.td3.batch_size > 0, "td3.batch_size: must be > 0");
    check(cfg.td3.buffer_capacity > 0, "td3.buffer_capacity: must be > 0");
    check(cfg.td3.target_noise >= 0.0, "td3.target_noise: must be >= 0");
    check(cfg.td3.target_noise_clip >= 0.0, "td3.target_noise_clip: must be >= 0");
    check(cfg.td3.policy_delay >= 1, "td3.policy_delay: must be >= 1");
    check(cfg.td3.tau > 0.0 && cfg.td3.tau <= 1.0, "td3.tau: must be in (0, 1]");
    check(cfg.td3.exploration_noise >= 0.0, "td3.exploration_noise: must be >= 0");
    check(!cfg.td3.hidden.empty(), "td3.hidden: must be non-empty");
    for (int h : cfg.td3.hidden) check(h > 0, "td3.hidden: widths must be positive");
    check(cfg.training.episodes >= 1, "training.episodes: must be >= 1");
    check(cfg.training.episodes <= 1000000, "training.episodes: must be <= 1000000");
    check(cfg.training.warmup_steps >= 0, "training.warmup_steps: must be >= 0");
    check(cfg.training.update_every_steps >= 1, "training.update_every_steps: must be >= 1");
    check(cfg.training.eval_every_episodes >= 0, "training.eval_every_episodes: must be >= 0");
    check(cfg.training.eval_episodes >= 1, "training.eval_episodes: must be >= 1");
    check(cfg.training.checkpoint_every_episodes >= 0,
          "training.checkpoint_every_episodes: must be >= 0");
    return items;
}

inline RunConfig run_config_from_json(const nlohmann::json& j) {
    std::vector<std::string> errors;
    detail::JsonReader r(errors);
    RunConfig cfg;

    r.expect_keys(j, "config",
                  {"run_id", "seed", "episodes", "max_steps", "dt_s", "shield_on",
                   "critical_distance_m", "evader", "pursuer", "obstacles", "target", "shield",
                   "td3", "training"});
    r.text(j, "run_id", "config", cfg.run_id);
    r.number(j, "seed", "config", cfg.seed);
    r.number(j, "episodes", "config", cfg.training.episodes);
    r.number(j, "max_steps", "config", cfg.episode.max_steps);
    r.number(j, "dt_s", "config", cfg.episode.dt);
    r.boolean(j, "shield_on", "config", cfg.episode.shield_on);
    r.number(j, "critical_distance_m", "config", cfg.episode.critical_distance);

    if (j.contains("evader")) {
        const auto& e = j.at("evader");
        r.expect_keys(e, "evader", {"start_x_m", "start_y_m", "speed_m_per_s"});
        r.number(e, "start_x_m", "evader", cfg.episode.evader_start.x);
        r.number(e, "start_y_m", "evader", cfg.episode.evader_start.y);
        r.number(e, "speed_m_per_s", "evader", cfg.episode.or_params.speed);
    }
    if (j.contains("pursuer")) {
        const auto& p = j.at("pursuer");
        r.expect_keys(p, "pursuer",
                      {"start_x_m", "start_y_m", "start_heading_rad", "speed_m_per_s",
                       "half_axle_m", "wheel_limit_m_per_s", "mode", "angle_tolerance_rad",
                       "angular_gain", "approach_brake", "standoff_m"});
        r.number(p, "start_x_m", "pursuer", cfg.episode.pursuer_start.x);
        r.number(p, "start_y_m", "pursuer", cfg.episode.pursuer_start.y);
        r.number(p, "start_heading_rad", "pursuer", cfg.episode.pursuer_start.heading);
        r.number(p, "speed_m_per_s", "pursuer", cfg.episode.ddr_params.speed);
        r.number(p, "half_axle_m", "pursuer", cfg.episode.ddr_params.half_axle);
        r.number(p, "wheel_limit_m_per_s", "pursuer", cfg.episode.ddr_params.wheel_limit);
        std::string mode = cfg.episode.pursuit.mode == PursuitMode::PurePursuit
                               ? "pure-pursuit"
                               : "turn-then-chase";
        r.text(p, "mode", "pursuer", mode);
        if (mode == "turn-then-chase") {
            cfg.episode.pursuit.mode = PursuitMode::TurnThenChase;
        } else if (mode == "pure-pursuit") {
            cfg.episode.pursuit.mode = PursuitMode::PurePursuit;
        } else {
            errors.push_back("pursuer.mode: expected 'turn-then-chase' or 'pure-pursuit'");
        }
        r.number(p, "angle_tolerance_rad", "pursuer", cfg.episode.pursuit.angle_tolerance);
        r.number(p, "angular_gain", "pursuer", cfg.episode.pursuit.angular_gain);
        r.boolean(p, "approach_brake", "pursuer", cfg.episode.pursuit.approach_brake);
        r.number(p, "standoff_m", "pursuer", cfg.episode.pursuit.standoff);
    }
    if (j.contains("obstacles")) {
        const auto& arr = j.at("obstacles");
        if (!arr.is_array()) {
            errors.push_back("obstacles: expected an array");
        } else {
            cfg.episode.obstacles.clear();
            for (std::size_t i = 0; i < arr.size(); ++i) {
                const std::string path = "obstacles[" + std::to_string(i) + "]";
                ObstacleState c{};
                r.expect_keys(arr[i], path, {"x_m", "y_m", "vx_m_per_s", "vy_m_per_s"});
                r.number(arr[i], "x_m", path, c.x);
                r.number(arr[i], "y_m", path, c.y);
                r.number(arr[i], "vx_m_per_s", path, c.vx);
                r.number(arr[i], "vy_m_per_s", path, c.vy);
                cfg.episode.obstacles.push_back(c);
            }
        }
    }
    if (j.contains("target")) {
        const auto& t = j.at("target");
        r.expect_keys(t, "target", {"fixed_m", "region"});
        if (t.is_object() && t.contains("fixed_m") && t.contains("region")) {
            errors.push_back("target: give either fixed_m or region, not both");
        }
        if (t.is_object() && t.contains("fixed_m")) {
            const auto& f = t.at("fixed_m");
            if (!f.is_array() || f.size() != 2 || !f[0].is_number() || !f[1].is_number()) {
                errors.push_back("target.fixed_m: expected [x, y]");
            } else {
                cfg.episode.fixed_target = Vec2{f[0].get<double>(), f[1].get<double>()};
            }
        }
        if (t.is_object() && t.contains("region")) {
            const auto& b = t.at("region");
            r.expect_keys(b, "target.region", {"x_min_m", "x_max_m", "y_min_m", "y_max_m"});
            r.number(b, "x_min_m", "target.region", cfg.episode.target_region.x_min);
            r.number(b, "x_max_m", "target.region", cfg.episode.target_region.x_max);
            r.number(b, "y_min_m", "target.region", cfg.episode.target_region.y_min);
            r.number(b, "y_max_m", "target.region", cfg.episode.target_region.y_max);
        }
    }
    if (j.contains("shield")) {
        const auto& s = j.at("shield");
        r.expect_keys(s, "shield", {"gamma_oc_per_s", "gamma_pv_per_s", "d_oc_m", "d_pv_m"});
        r.number(s, "gamma_oc_per_s", "shield", cfg.episode.shield.gamma_oc);
        r.number(s, "gamma_pv_per_s", "shield", cfg.episode.shield.gamma_pv);
        r.number(s, "d_oc_m", "shield", cfg.episode.shield.d_oc);
        r.number(s, "d_pv_m", "shield", cfg.episode.shield.d_pv);
    }
    if (j.contains("td3")) {
        const auto& t = j.at("td3");
        r.expect_keys(t, "td3",
                      {"actor_lr", "critic_lr", "discount", "batch_size", "buffer_capacity",
                       "target_noise", "target_noise_clip", "policy_delay", "tau",
                       "exploration_noise", "hidden"});
        r.number(t, "actor_lr", "td3", cfg.td3.actor_lr);
        r.number(t, "critic_lr", "td3", cfg.td3.critic_lr);
        r.number(t, "discount", "td3", cfg.td3.discount);
        r.number(t, "batch_size", "td3", cfg.td3.batch_size);
        r.number(t, "buffer_capacity", "td3", cfg.td3.buffer_capacity);
        r.number(t, "target_noise", "td3", cfg.td3.target_noise);
        r.number(t, "target_noise_clip", "td3", cfg.td3.target_noise_clip);
        r.number(t, "policy_delay", "td3", cfg.td3.policy_delay);
        r.number(t, "tau", "td3", cfg.td3.tau);
        r.number(t, "exploration_noise", "td3", cfg.td3.exploration_noise);
        if (t.is_object() && t.contains("hidden")) {
            const auto& h = t.at("hidden");
            bool ok = h.is_array() && !h.empty();
            if (ok) {
                for (const auto& v : h) ok = ok && v.is_number_integer();
            }
            if (!ok) {
                errors.push_back("td3.hidden: expected a non-empty array of integers");
            } else {
                cfg.td3.hidden = h.get<std::vector<int>>();
            }
        }
    }
    if (j.contains("training")) {
        const auto& t = j.at("training");
        r.expect_keys(t, "training",
                      {"warmup_steps", "update_every_steps", "eval_every_episodes",
                       "eval_episodes", "checkpoint_every_episodes"});
        r.number(t, "warmup_steps", "training", cfg.training.warmup_steps);
        r.number(t, "update_every_steps", "training", cfg.training.update_every_steps);
        r.number(t, "eval_every_episodes", "training", cfg.training.eval_every_episodes);
        r.number(t, "eval_episodes", "training", cfg.training.eval_episodes);
        r.number(t, "checkpoint_every_episodes", "training",
                 cfg.training.checkpoint_every_episodes);
    }

    const auto value_items = validate_items(cfg);
    errors.insert(errors.end(), value_items.begin(), value_items.end());
    if (!errors.empty()) throw ConfigError(errors);
    return cfg;
}

inline nlohmann::json run_config_to_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["run_id"] = cfg.run_id;
    j["seed"] = cfg.seed;
    j["episodes"] = cfg.training.episodes;
    j["max_steps"] = cfg.episode.max_steps;
    j["dt_s"] = cfg.episode.dt;
    j["shield_on"] = cfg.episode.shield_on;
    j["critical_distance_m"] = cfg.episode.critical_distance;
    j["evader"] = {{"start_x_m", cfg.episode.evader_start.x},
                   {"start_y_m", cfg.episode.evader_start.y},
                   {"speed_m_per_s", cfg.episode.or_params.speed}};
    j["pursuer"] = {{"start_x_m", cfg.episode.pursuer_start.x},
                    {"start_y_m", cfg.episode.pursuer_start.y},
                    {"start_heading_rad", cfg.episode.pursuer_start.heading},
                    {"speed_m_per_s", cfg.episode.ddr_params.speed},
                    {"half_axle_m", cfg.episode.ddr_params.half_axle},
                    {"wheel_limit_m_per_s", cfg.episode.ddr_params.wheel_limit},
                    {"mode", cfg.episode.pursuit.mode == PursuitMode::PurePursuit
                                 ? "pure-pursuit"
                                 : "turn-then-chase"},
                    {"angle_tolerance_rad", cfg.episode.pursuit.angle_tolerance},
                    {"angular_gain", cfg.episode.pursuit.angular_gain},
                    {"approach_brake", cfg.episode.pursuit.approach_brake},
                    {"standoff_m", cfg.episode.pursuit.standoff}};
    j["obstacles"] = nlohmann::json::array();
    for (const auto& c : cfg.episode.obstacles) {
        j["obstacles"].push_back({{"x_m", c.x},
                                  {"y_m", c.y},
                                  {"vx_m_per_s", c.vx},
                                  {"vy_m_per_s", c.vy}});
    }
    if (cfg.episode.fixed_target) {
        j["target"] = {{"fixed_m", {cfg.episode.fixed_target->x, cfg.episode.fixed_target->y}}};
    } else {
        j["target"] = {{"region",
                        {{"x_min_m", cfg.episode.target_region.x_min},
                         {"x_max_m", cfg.episode.target_region.x_max},
                         {"y_min_m", cfg.episode.target_region.y_min},
                         {"y_max_m", cfg.episode.target_region.y_max}}}};
    }
    j["shield"] = {{"gamma_oc_per_s", cfg.episode.shield.gamma_oc},
                   {"gamma_pv_per_s", cfg.episode.shield.gamma_pv},
                   {"d_oc_m", cfg.episode.shield.d_oc},
                   {"d_pv_m", cfg.episode.shield.d_pv}};
    j["td3"] = {{"actor_lr", cfg.td3.actor_lr},
                {"critic_lr", cfg.td3.critic_lr},
                {"discount", cfg.td3.discount},
                {"batch_size", cfg.td3.batch_size},
                {"buffer_capacity", cfg.td3.buffer_capacity},
                {"target_noise", cfg.td3.target_noise},
                {"target_noise_clip", cfg.td3.target_noise_clip},
                {"policy_delay", cfg.td3.policy_delay},
                {"tau", cfg.td3.tau},
                {"exploration_noise", cfg.td3.exploration_noise},
                {"hidden", cfg.td3.hidden}};
    j["training"] = {{"warmup_steps", cfg.training.warmup_steps},
                     {"update_every_steps", cfg.training.update_every_steps},
                     {"eval_every_episodes", cfg.training.eval_every_episodes},
                     {"eval_episodes", cfg.training.eval_episodes},
                     {"checkpoint_every_episodes", cfg.training.checkpoint_every_episodes}};
    return j;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError({"cannot open config file: " + path});
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError({std::string("config is not valid JSON: ") + e.what()});
    }
    return run_config_from_json(j);
}

inline void save_run_config(const std::string& path, const RunConfig& cfg) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write config: " + path);
    os << run_config_to_json(cfg).dump(2) << "\n";
}

} // namespace evade
