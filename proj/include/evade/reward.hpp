#pragma once

#include "evade/geometry.hpp"
#include "evade/world.hpp"

namespace evade {

inline constexpr double kReachedReward = 1000.0;
inline constexpr double kDistancePenaltyRate = 0.01;

/// Sparse goal reward: the terminal bonus inside the critical distance,
/// otherwise a small penalty proportional to the remaining distance.
inline double reward(const WorldState& w, double critical_distance) {
    const double d1 = target_distance(w);
    if (d1 <= critical_distance) return kReachedReward;
    return -kDistancePenaltyRate * d1;
}

} // namespace evade
