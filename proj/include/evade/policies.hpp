#pragma once

#include <cmath>
#include <random>

#include "evade/dynamics.hpp"
#include "evade/geometry.hpp"
#include "evade/observation.hpp"
#include "evade/rng.hpp"
#include "evade/td3.hpp"
#include "evade/world.hpp"

namespace evade {

/// Heads straight at the target; the shield supplies any detours.
struct StraightToTargetPolicy {
    EvaderAction operator()(const WorldState& w) const {
        const Vec2 d = w.target - position(w.evader);
        if (norm(d) == 0.0) return EvaderAction{0.0};
        return EvaderAction{std::atan2(d.y, d.x)};
    }
};

struct RandomPolicy {
    explicit RandomPolicy(std::uint64_t seed) : rng_(make_rng(seed, Stream::Exploration)) {}

    EvaderAction operator()(const WorldState&) {
        std::uniform_real_distribution<double> heading(-kPi, kPi);
        return EvaderAction{wrap_angle(heading(rng_))};
    }

private:
    std::mt19937_64 rng_;
};

/// Wraps a TD3 agent as an episode policy.
struct AgentPolicy {
    Td3Agent* agent = nullptr;
    bool deterministic = true;

    EvaderAction operator()(const WorldState& w) {
        const Observation obs = observe(w);
        const PolicyAction a = agent->act(obs, deterministic);
        return EvaderAction{heading_from_raw(a.raw)};
    }
};

} // namespace evade
