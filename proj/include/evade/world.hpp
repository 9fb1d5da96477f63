#pragma once

#include <vector>

#include "evade/dynamics.hpp"
#include "evade/geometry.hpp"

namespace evade {

/// Snapshot of every entity at one instant.
struct WorldState {
    OrState evader;
    DdrState pursuer;
    std::vector<ObstacleState> obstacles;
    Vec2 target;
    double t = 0.0;     // elapsed time [s]
    int step_index = 0; // t == step_index * dt
};

inline double target_distance(const WorldState& w) {
    return norm(w.target - position(w.evader));
}

} // namespace evade
