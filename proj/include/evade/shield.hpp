#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "evade/dynamics.hpp"
#include "evade/geometry.hpp"
#include "evade/world.hpp"

namespace evade {

struct ShieldConfig {
    double gamma_oc = 1.0; // obstacle class-K slope
    double gamma_pv = 1.2; // pursuer class-K slope
    double d_oc = 0.2;     // collision distance [m]
    double d_pv = 0.2;     // capture distance [m]
};

enum class BarrierKind { Obstacle, Pursuer };

/// Signed distance to the unsafe boundary: h >= 0 iff the state is in the
/// corresponding safe set.
struct BarrierValue {
    double h = 0.0;
    BarrierKind kind = BarrierKind::Obstacle;
    int index = 0; // obstacle index; unused for the pursuer
};

/// Half-plane constraint c.u + d >= 0 on the evader velocity u. c is the unit
/// vector from the threat toward the evader, so the constraint bounds the
/// closing speed: c.u - c.v_threat >= -gamma * h.
struct BarrierConstraint {
    Vec2 c;
    double d = 0.0;
    BarrierKind kind = BarrierKind::Obstacle;
    int index = 0;
};

/// Raised when the evader coincides with a threat and no barrier direction
/// exists. Inside an episode this state is already past the safety boundary.
class SingularityError : public std::runtime_error {
public:
    SingularityError(BarrierKind kind, int index)
        : std::runtime_error(kind == BarrierKind::Pursuer
                                 ? std::string("evader coincides with the pursuer")
                                 : "evader coincides with obstacle " + std::to_string(index)),
          kind(kind),
          index(index) {}
    BarrierKind kind;
    int index;
};

namespace detail {

inline constexpr double kSingularDistance = 1e-9;

inline Vec2 unit_offset(Vec2 delta, BarrierKind kind, int index) {
    const double r = norm(delta);
    if (r < kSingularDistance) throw SingularityError(kind, index);
    return {delta.x / r, delta.y / r};
}

} // namespace detail

inline BarrierValue obstacle_barrier(const OrState& evader, const ObstacleState& obs,
                                     const ShieldConfig& cfg, int index = 0) {
    const Vec2 delta = position(evader) - position(obs);
    const double r = norm(delta);
    if (r < detail::kSingularDistance) throw SingularityError(BarrierKind::Obstacle, index);
    return {r - cfg.d_oc, BarrierKind::Obstacle, index};
}

inline BarrierValue pursuer_barrier(const OrState& evader, const DdrState& ddr,
                                    const ShieldConfig& cfg) {
    const Vec2 delta = position(evader) - position(ddr);
    const double r = norm(delta);
    if (r < detail::kSingularDistance) throw SingularityError(BarrierKind::Pursuer, 0);
    return {r - cfg.d_pv, BarrierKind::Pursuer, 0};
}

/// Constraint keeping the evader clear of one obstacle:
///   c = (p_e - p_obs)/|.|,  d = -c.v_obs + gamma_oc * h.
inline BarrierConstraint obstacle_constraint(const OrState& evader, const ObstacleState& obs,
                                             const ShieldConfig& cfg, int index = 0) {
    const Vec2 delta = position(evader) - position(obs);
    const Vec2 c = detail::unit_offset(delta, BarrierKind::Obstacle, index);
    const double h = norm(delta) - cfg.d_oc;
    const double d = -dot(c, Vec2{obs.vx, obs.vy}) + cfg.gamma_oc * h;
    return {c, d, BarrierKind::Obstacle, index};
}

/// Constraint keeping the evader clear of the pursuer, modeling the DDR as
/// translating at its cruise speed along its current heading:
///   c = (p_e - p_d)/|.|,  d = -c.(v_d cos, v_d sin) + gamma_pv * h.
inline BarrierConstraint pursuer_constraint(const OrState& evader, const DdrState& ddr,
                                            const DdrParams& params, const ShieldConfig& cfg) {
    const Vec2 delta = position(evader) - position(ddr);
    const Vec2 c = detail::unit_offset(delta, BarrierKind::Pursuer, 0);
    const double h = norm(delta) - cfg.d_pv;
    const Vec2 v_ddr = params.speed * heading_vector(ddr.heading);
    const double d = -dot(c, v_ddr) + cfg.gamma_pv * h;
    return {c, d, BarrierKind::Pursuer, 0};
}

/// All barrier constraints of a world state: one per obstacle (in index
/// order), then the pursuer. Satisfying every constraint keeps the composite
/// barrier min_i h_i nonnegative.
inline std::vector<BarrierConstraint> assemble_constraints(const WorldState& world,
                                                           const DdrParams& ddr_params,
                                                           const ShieldConfig& cfg) {
    std::vector<BarrierConstraint> out;
    out.reserve(world.obstacles.size() + 1);
    for (std::size_t i = 0; i < world.obstacles.size(); ++i) {
        out.push_back(obstacle_constraint(world.evader, world.obstacles[i], cfg,
                                          static_cast<int>(i)));
    }
    out.push_back(pursuer_constraint(world.evader, world.pursuer, ddr_params, cfg));
    return out;
}

} // namespace evade
