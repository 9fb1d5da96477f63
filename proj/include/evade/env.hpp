#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "evade/dynamics.hpp"
#include "evade/geometry.hpp"
#include "evade/pursuit.hpp"
#include "evade/reward.hpp"
#include "evade/rng.hpp"
#include "evade/safefilter.hpp"
#include "evade/shield.hpp"
#include "evade/world.hpp"

namespace evade {

struct TargetRegion {
    double x_min = 0.0;
    double x_max = 3.0;
    double y_min = -1.5;
    double y_max = 1.5;
};

/// Everything needed to run one episode as a pure function of the seed.
struct EpisodeConfig {
    double dt = 0.05;
    int max_steps = 1500;
    OrState evader_start{0.0, 0.0};
    DdrState pursuer_start{1.0, -0.5, 0.0};
    std::vector<ObstacleState> obstacles;
    std::optional<Vec2> fixed_target;
    TargetRegion target_region;
    std::uint64_t seed = 0;
    bool shield_on = true;
    double critical_distance = 0.05;
    int target_retries = 100;
    OrParams or_params;
    DdrParams ddr_params;
    PursuitConfig pursuit;
    ShieldConfig shield;

    void validate() const {
        detail::require_dt(dt);
        if (max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
        if (!(critical_distance > 0.0))
            throw std::invalid_argument("critical_distance must be > 0");
        if (target_retries < 1) throw std::invalid_argument("target_retries must be >= 1");
        if (target_region.x_min > target_region.x_max ||
            target_region.y_min > target_region.y_max) {
            throw std::invalid_argument("target region must have min <= max");
        }
        if (!(or_params.speed > 0.0)) throw std::invalid_argument("evader speed must be > 0");
        if (!(ddr_params.speed > 0.0)) throw std::invalid_argument("pursuer speed must be > 0");
        if (!(ddr_params.half_axle > 0.0)) throw std::invalid_argument("half_axle must be > 0");
        if (!(ddr_params.wheel_limit > 0.0)) throw std::invalid_argument("wheel_limit must be > 0");
    }
};

enum class Outcome { ReachedTarget, Captured, Collided, Timeout };

inline const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::ReachedTarget: return "reached-target";
        case Outcome::Captured: return "captured";
        case Outcome::Collided: return "collided";
        case Outcome::Timeout: return "timeout";
    }
    return "unknown";
}

inline std::optional<Outcome> outcome_from_string(const std::string& s) {
    for (Outcome o : {Outcome::ReachedTarget, Outcome::Captured, Outcome::Collided,
                      Outcome::Timeout}) {
        if (s == to_string(o)) return o;
    }
    return std::nullopt;
}

/// One recorded step: the post-step state plus the decision that produced it.
struct StepRow {
    double time = 0.0;
    OrState evader;
    DdrState pursuer;
    std::vector<ObstacleState> obstacles;
    double nominal_heading = 0.0;
    double safe_heading = 0.0;
    bool corrected = false;
    double h_pv = 0.0;
    std::vector<double> h_oc;
    double margin = 0.0;
    bool feasible = true;
    double deviation = 0.0;
    double reward = 0.0;
};

struct EpisodeRecord {
    std::uint64_t seed = 0;
    std::vector<StepRow> rows;
    Outcome outcome = Outcome::Timeout;
    bool safe_episode = true;
    int corrected_steps = 0;
    int infeasible_steps = 0;
    double total_reward = 0.0;

    double min_h() const {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& row : rows) {
            m = std::min(m, row.h_pv);
            for (double h : row.h_oc) m = std::min(m, h);
        }
        return m;
    }
};

inline WorldState reset(const EpisodeConfig& cfg) {
    cfg.validate();
    WorldState w;
    w.evader = cfg.evader_start;
    w.pursuer = cfg.pursuer_start;
    w.pursuer.heading = wrap_angle(w.pursuer.heading);
    w.obstacles = cfg.obstacles;
    w.t = 0.0;
    w.step_index = 0;

    if (cfg.fixed_target) {
        w.target = *cfg.fixed_target;
        return w;
    }
    std::mt19937_64 rng = make_rng(cfg.seed, Stream::Environment);
    std::uniform_real_distribution<double> sx(cfg.target_region.x_min, cfg.target_region.x_max);
    std::uniform_real_distribution<double> sy(cfg.target_region.y_min, cfg.target_region.y_max);
    for (int attempt = 0; attempt < cfg.target_retries; ++attempt) {
        const Vec2 candidate{sx(rng), sy(rng)};
        bool clear = norm(candidate - position(cfg.pursuer_start)) > cfg.shield.d_pv;
        for (const auto& c : cfg.obstacles) {
            clear = clear && norm(candidate - position(c)) > cfg.shield.d_oc;
        }
        if (clear) {
            w.target = candidate;
            return w;
        }
    }
    throw std::runtime_error("target sampling failed: no clear point after " +
                             std::to_string(cfg.target_retries) + " attempts");
}

struct StepResult {
    WorldState world;
    double reward = 0.0;
    StepRow row;
    bool done = false;
    Outcome outcome = Outcome::Timeout; // meaningful only when done
};

/// Advances one tick: assemble constraints, filter the nominal action, decide
/// the pursuer command, then move every entity from the same snapshot.
inline StepResult step_world(const WorldState& w, const EvaderAction& nominal,
                             const EpisodeConfig& cfg) {
    const auto constraints = assemble_constraints(w, cfg.ddr_params, cfg.shield);

    FilterResult filtered;
    if (cfg.shield_on) {
        filtered = filter_action(nominal, constraints, cfg.or_params.speed);
    } else {
        filtered.safe_action = EvaderAction{wrap_angle(nominal.heading)};
        filtered.corrected = false;
        filtered.deviation = 0.0;
        filtered.feasible = true;
        filtered.margin = detail::min_margin(constraints, cfg.or_params.speed,
                                             filtered.safe_action.heading);
    }

    const PursuitContext ctx{cfg.or_params.speed, cfg.shield.gamma_pv, cfg.shield.d_pv};
    const DdrCommand cmd = pursue(w.pursuer, cfg.ddr_params, w.evader, cfg.pursuit, ctx, cfg.dt);

    StepResult out;
    out.world = w;
    out.world.evader = step_or(w.evader, cfg.or_params, filtered.safe_action, cfg.dt);
    out.world.pursuer = step_ddr(w.pursuer, cfg.ddr_params, cmd, cfg.dt);
    for (auto& c : out.world.obstacles) c = step_obstacle(c, cfg.dt);
    out.world.step_index = w.step_index + 1;
    out.world.t = out.world.step_index * cfg.dt;

    out.reward = reward(out.world, cfg.critical_distance);

    StepRow& row = out.row;
    row.time = out.world.t;
    row.evader = out.world.evader;
    row.pursuer = out.world.pursuer;
    row.obstacles = out.world.obstacles;
    row.nominal_heading = wrap_angle(nominal.heading);
    row.safe_heading = filtered.safe_action.heading;
    row.corrected = filtered.corrected;
    row.h_pv = pursuer_barrier(out.world.evader, out.world.pursuer, cfg.shield).h;
    row.h_oc.reserve(out.world.obstacles.size());
    for (std::size_t i = 0; i < out.world.obstacles.size(); ++i) {
        row.h_oc.push_back(obstacle_barrier(out.world.evader, out.world.obstacles[i],
                                            cfg.shield, i)
                               .h);
    }
    row.margin = filtered.margin;
    row.feasible = filtered.feasible;
    row.deviation = filtered.deviation;
    row.reward = out.reward;

    const double d1 = target_distance(out.world);
    const double d_pursuer = norm(position(out.world.pursuer) - position(out.world.evader));
    bool collided = false;
    for (const auto& c : out.world.obstacles) {
        collided = collided || norm(position(c) - position(out.world.evader)) < cfg.shield.d_oc;
    }
    if (d1 <= cfg.critical_distance) {
        out.done = true;
        out.outcome = Outcome::ReachedTarget;
    } else if (d_pursuer < cfg.shield.d_pv) {
        out.done = true;
        out.outcome = Outcome::Captured;
    } else if (collided) {
        out.done = true;
        out.outcome = Outcome::Collided;
    } else if (out.world.step_index >= cfg.max_steps) {
        out.done = true;
        out.outcome = Outcome::Timeout;
    }
    return out;
}

/// Rolls out one full episode with `policy(world) -> EvaderAction`.
template <typename Policy>
EpisodeRecord run_episode(const EpisodeConfig& cfg, Policy&& policy) {
    EpisodeRecord record;
    record.seed = cfg.seed;
    WorldState w = reset(cfg);
    record.rows.reserve(static_cast<std::size_t>(cfg.max_steps));
    while (true) {
        const EvaderAction nominal = policy(static_cast<const WorldState&>(w));
        StepResult r = step_world(w, nominal, cfg);
        record.total_reward += r.reward;
        if (r.row.corrected) ++record.corrected_steps;
        if (!r.row.feasible) ++record.infeasible_steps;
        record.rows.push_back(std::move(r.row));
        w = r.world;
        if (r.done) {
            record.outcome = r.outcome;
            break;
        }
    }
    record.safe_episode = record.min_h() >= 0.0;
    return record;
}

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc()) throw std::runtime_error("number formatting failed");
    return std::string(buf, res.ptr);
}

} // namespace detail

/// Column layout: obstacle position columns are named x_c, y_c for the
/// single-obstacle scene and x_c_<i>, y_c_<i> otherwise; barrier columns are
/// h_oc_<i> per obstacle. Rows hold the post-step state; heading angles are
/// radians and `corrected` is 0/1.
inline std::string episode_csv_header(std::size_t n_obstacles) {
    std::string h = "time,x_o,y_o,x_d,y_d,theta_d";
    if (n_obstacles == 1) {
        h += ",x_c,y_c";
    } else {
        for (std::size_t i = 0; i < n_obstacles; ++i) {
            h += ",x_c_" + std::to_string(i) + ",y_c_" + std::to_string(i);
        }
    }
    h += ",nominal_theta,safe_theta,corrected,h_pv";
    for (std::size_t i = 0; i < n_obstacles; ++i) h += ",h_oc_" + std::to_string(i);
    h += ",margin,reward";
    return h;
}

inline void write_episode_csv(std::ostream& os, const EpisodeRecord& record) {
    const std::size_t n_obstacles = record.rows.empty() ? 0 : record.rows.front().obstacles.size();
    os << episode_csv_header(n_obstacles) << "\n";
    for (const auto& row : record.rows) {
        os << detail::format_double(row.time) << ',' << detail::format_double(row.evader.x) << ','
           << detail::format_double(row.evader.y) << ',' << detail::format_double(row.pursuer.x)
           << ',' << detail::format_double(row.pursuer.y) << ','
           << detail::format_double(row.pursuer.heading);
        for (const auto& c : row.obstacles) {
            os << ',' << detail::format_double(c.x) << ',' << detail::format_double(c.y);
        }
        os << ',' << detail::format_double(row.nominal_heading) << ','
           << detail::format_double(row.safe_heading) << ',' << (row.corrected ? 1 : 0) << ','
           << detail::format_double(row.h_pv);
        for (double h : row.h_oc) os << ',' << detail::format_double(h);
        os << ',' << detail::format_double(row.margin) << ','
           << detail::format_double(row.reward) << "\n";
    }
}

} // namespace evade
