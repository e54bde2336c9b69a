#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace grpsis {

/// Random source owned by a single simulation run. Never shared between runs.
using Rng = std::mt19937_64;

/// Uniform draw on (0, 1]. Zero is excluded so that log(U) and U^(-a) stay finite.
inline double uniform_open_closed(Rng& rng) {
    return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

/// Exponential waiting time with the given rate.
inline double exponential_draw(Rng& rng, double rate) {
    return -std::log(uniform_open_closed(rng)) / rate;
}

inline double standard_normal(Rng& rng) {
    return std::normal_distribution<double>{}(rng);
}

/// Uniform integer on [0, bound).
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>{0, bound - 1}(rng);
}

/// SplitMix64 step; advances `state` and returns the next output.
std::uint64_t splitmix64(std::uint64_t& state);

/// Distinct per-run seeds derived from one master seed.
std::vector<std::uint64_t> derive_seeds(std::uint64_t master, std::size_t count);

} // namespace grpsis
