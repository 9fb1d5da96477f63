#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "evade/geometry.hpp"
#include "evade/world.hpp"

namespace evade {

inline constexpr int kObservationDim = 10;
using Observation = std::array<double, kObservationDim>;

/// Egocentric policy input: target and pursuer offsets from the evader,
/// pursuer heading as (cos, sin), nearest-obstacle offset and its velocity.
/// Offsets are scaled by `scale`; the obstacle slots are zero when the world
/// has no obstacles.
inline Observation observe(const WorldState& w, double scale = 5.0) {
    if (!(scale > 0.0)) throw std::invalid_argument("observation scale must be > 0");
    const Vec2 evader = position(w.evader);

    Observation obs{};
    const Vec2 to_target = (w.target - evader) * (1.0 / scale);
    obs[0] = to_target.x;
    obs[1] = to_target.y;
    const Vec2 to_pursuer = (position(w.pursuer) - evader) * (1.0 / scale);
    obs[2] = to_pursuer.x;
    obs[3] = to_pursuer.y;
    obs[4] = std::cos(w.pursuer.heading);
    obs[5] = std::sin(w.pursuer.heading);

    if (!w.obstacles.empty()) {
        std::size_t nearest = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < w.obstacles.size(); ++i) {
            const double d = norm(position(w.obstacles[i]) - evader);
            if (d < best) {
                best = d;
                nearest = i;
            }
        }
        const auto& c = w.obstacles[nearest];
        const Vec2 to_obstacle = (position(c) - evader) * (1.0 / scale);
        obs[6] = to_obstacle.x;
        obs[7] = to_obstacle.y;
        obs[8] = c.vx;
        obs[9] = c.vy;
    }

    for (double v : obs) {
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite observation component");
    }
    return obs;
}

} // namespace evade
