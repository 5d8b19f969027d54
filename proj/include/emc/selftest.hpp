#pragma once

// Invariant suite over every module at fixed seeds. Prints one PASS/FAIL
// line per invariant and stops at the first breach.

#include "emc/tolerances.hpp"

#include <cstdint>
#include <ostream>
#include <string>

namespace emc {

struct SelftestOptions {
    std::uint64_t seed = 0;
    Tolerances tol;
    // Test hooks. The corruption is confined to the invariant that should catch it.
    bool corrupt_sqrt_cache = false; // route equivalence
    bool corrupt_phase = false;      // phase modulus
};

struct SelftestResult {
    bool passed = true;
    std::size_t checks = 0;
    std::string failed_invariant;
    double residual = 0.0;
    double threshold = 0.0;
};

SelftestResult run_selftest(const SelftestOptions &options, std::ostream &out);

} // namespace emc
