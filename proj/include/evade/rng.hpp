#pragma once

#include <cstdint>
#include <random>

namespace evade {

/// splitmix64 step; used to derive decorrelated stream seeds from one master
/// seed so that consumers (environment, exploration noise, replay sampling)
/// stay independent of each other's draw counts.
inline std::uint64_t mix_seed(std::uint64_t state) {
    std::uint64_t z = state + 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

enum class Stream : std::uint64_t {
    Environment = 1,
    Exploration = 2,
    Replay = 3,
    Init = 4,
};

/// Seed for a named stream, optionally indexed (e.g. per-episode).
inline std::uint64_t stream_seed(std::uint64_t master, Stream stream, std::uint64_t index = 0) {
    return mix_seed(mix_seed(master ^ static_cast<std::uint64_t>(stream)) + index);
}

inline std::mt19937_64 make_rng(std::uint64_t master, Stream stream, std::uint64_t index = 0) {
    return std::mt19937_64(stream_seed(master, stream, index));
}

} // namespace evade
