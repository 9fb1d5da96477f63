#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "evade/geometry.hpp"

namespace evade {

/// Position of the omnidirectional robot (the evader).
struct OrState {
    double x = 0.0;
    double y = 0.0;
};

/// The evader translates at a fixed speed; only its heading is commanded.
struct OrParams {
    double speed = 0.1574; // [m/s]
};

/// Commanded heading of the evader, in (-pi, pi].
struct EvaderAction {
    double heading = 0.0; // [rad]
};

/// Pose of the differential-drive robot (the pursuer).
struct DdrState {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0; // [rad], kept in (-pi, pi]
};

struct DdrParams {
    double speed = 0.2;       // cruise translational speed bound [m/s]
    double half_axle = 0.1;   // center-to-wheel distance b [m]
    double wheel_limit = 0.4; // per-wheel angular speed bound [rad/s]
};

/// Left/right wheel angular velocities. Translational speed is (left+right)/2,
/// turn rate (right-left)/(2b).
struct DdrCommand {
    double left = 0.0;
    double right = 0.0;
};

/// Obstacle drifting at a constant velocity.
struct ObstacleState {
    double x = 0.0;
    double y = 0.0;
    double vx = 0.0;
    double vy = 0.0;
};

inline Vec2 position(const OrState& s) { return {s.x, s.y}; }
inline Vec2 position(const DdrState& s) { return {s.x, s.y}; }
inline Vec2 position(const ObstacleState& s) { return {s.x, s.y}; }

/// Velocity vector realized by an evader action.
inline Vec2 evader_velocity(const OrParams& p, const EvaderAction& a) {
    return p.speed * heading_vector(a.heading);
}

namespace detail {
inline void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string("non-finite ") + what);
    }
}
inline void require_dt(double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
}
} // namespace detail

/// One explicit Euler step of the evader.
inline OrState step_or(const OrState& s, const OrParams& p, const EvaderAction& a, double dt) {
    detail::require_dt(dt);
    detail::require_finite(s.x, "OR state x");
    detail::require_finite(s.y, "OR state y");
    detail::require_finite(a.heading, "evader heading");
    return {s.x + p.speed * std::cos(a.heading) * dt,
            s.y + p.speed * std::sin(a.heading) * dt};
}

/// One explicit Euler step of the pursuer. Heading is re-wrapped to (-pi, pi].
inline DdrState step_ddr(const DdrState& s, const DdrParams& p, const DdrCommand& c, double dt) {
    detail::require_dt(dt);
    detail::require_finite(s.x, "DDR state x");
    detail::require_finite(s.y, "DDR state y");
    detail::require_finite(s.heading, "DDR heading");
    const double bound = p.wheel_limit + 1e-12;
    if (std::abs(c.left) > bound || std::abs(c.right) > bound) {
        std::ostringstream msg;
        msg << "DDR command (" << c.left << ", " << c.right
            << ") exceeds wheel bound " << p.wheel_limit;
        throw std::invalid_argument(msg.str());
    }
    const double v = 0.5 * (c.left + c.right);
    const double omega = (c.right - c.left) / (2.0 * p.half_axle);
    return {s.x + v * std::cos(s.heading) * dt,
            s.y + v * std::sin(s.heading) * dt,
            wrap_angle(s.heading + omega * dt)};
}

/// One Euler step of a constant-velocity obstacle.
inline ObstacleState step_obstacle(const ObstacleState& s, double dt) {
    detail::require_dt(dt);
    detail::require_finite(s.x, "obstacle x");
    detail::require_finite(s.y, "obstacle y");
    return {s.x + s.vx * dt, s.y + s.vy * dt, s.vx, s.vy};
}

} // namespace evade
