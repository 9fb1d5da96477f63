#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "evade/dynamics.hpp"
#include "evade/geometry.hpp"

namespace evade {

enum class PursuitMode { TurnThenChase, PurePursuit };

struct PursuitConfig {
    PursuitMode mode = PursuitMode::TurnThenChase;
    double angle_tolerance = 0.05; // drive once aimed within this error [rad]
    double angular_gain = 2.0;     // pure-pursuit steering gain [1/s]
    bool approach_brake = true;
    double standoff = 0.08; // clearance held beyond the capture radius [m]
};

/// Engagement facts the pursuer's braking rule needs.
struct PursuitContext {
    double evader_speed = 0.1574;
    double barrier_gain = 1.2;   // decay rate the evader's filter enforces
    double capture_radius = 0.2; // pursuer-evader clearance distance
};

inline double bearing_error(const DdrState& d, const OrState& evader) {
    detail::require_finite(d.x, "pursuer x");
    detail::require_finite(d.y, "pursuer y");
    detail::require_finite(d.heading, "pursuer heading");
    detail::require_finite(evader.x, "evader x");
    detail::require_finite(evader.y, "evader y");
    return wrap_angle(std::atan2(evader.y - d.y, evader.x - d.x) - d.heading);
}

namespace detail {

/// Caps the commanded drive speed so the closing rate tapers to zero at the
/// standoff clearance: cos(e)*v <= v_o + gain*(h - standoff). A standoff above
/// (v_d - v_o)/gain keeps the engagement where full-speed flight can always
/// counter the worst-case closing, so pressing the chase never corners the
/// evader; a capped pursuer still runs down any target that does not flee.
inline double braked_speed(double speed, double cos_e, double distance,
                           const PursuitConfig& cfg, const PursuitContext& ctx) {
    if (!cfg.approach_brake || cos_e <= 1e-12) return speed;
    const double h = distance - ctx.capture_radius;
    const double allowed = std::max(
        0.0, ctx.evader_speed + ctx.barrier_gain * (h - cfg.standoff));
    return std::min(speed, allowed / cos_e);
}

} // namespace detail

/// One pursuit decision from the current snapshot. Turn-then-chase pivots in
/// place toward the evader until aimed within the tolerance, then drives
/// straight; the pivot rate is clamped so one step never overshoots the aim.
/// Pure pursuit arcs continuously, trading drive speed for turn rate when the
/// wheel limit binds.
inline DdrCommand pursue(const DdrState& d, const DdrParams& p, const OrState& evader,
                         const PursuitConfig& cfg, const PursuitContext& ctx, double dt) {
    detail::require_dt(dt);
    if (!(cfg.angle_tolerance > 0.0)) throw std::invalid_argument("angle_tolerance must be > 0");
    if (!(cfg.angular_gain > 0.0)) throw std::invalid_argument("angular_gain must be > 0");
    if (cfg.standoff < 0.0) throw std::invalid_argument("standoff must be >= 0");
    const double e = bearing_error(d, evader);
    const double dx = evader.x - d.x;
    const double dy = evader.y - d.y;
    const double distance = std::hypot(dx, dy);

    if (cfg.mode == PursuitMode::TurnThenChase) {
        if (std::abs(e) > cfg.angle_tolerance) {
            const double wheel = std::min(p.wheel_limit, std::abs(e) * p.half_axle / dt);
            return e > 0.0 ? DdrCommand{-wheel, wheel} : DdrCommand{wheel, -wheel};
        }
        const double v = detail::braked_speed(p.speed, std::cos(e), distance, cfg, ctx);
        return DdrCommand{v, v};
    }

    const double v = detail::braked_speed(p.speed, std::cos(e), distance, cfg, ctx);
    const double omega = cfg.angular_gain * e;
    double left = v - omega * p.half_axle;
    double right = v + omega * p.half_axle;
    const double peak = std::max(std::abs(left), std::abs(right));
    if (peak > p.wheel_limit) {
        const double scale = p.wheel_limit / peak;
        left *= scale;
        right *= scale;
    }
    return DdrCommand{left, right};
}

} // namespace evade
