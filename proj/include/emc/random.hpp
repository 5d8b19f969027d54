#pragma once

// Platform-independent seeded sampling. std::mt19937_64 output is fixed by
// the standard; the distributions below are defined here rather than taken
// from <random> so that seeded outputs are identical across standard libraries.

#include <cstdint>
#include <random>

namespace emc {

using Rng = std::mt19937_64;

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng &rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

/// Uniform integer on [0, n).
inline std::uint64_t uniform_index(Rng &rng, std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform01(rng) * static_cast<double>(n)) % n;
}

} // namespace emc
