#pragma once

#include <stdexcept>
#include <string>

namespace emc {

/// Input that fails a precondition: malformed files, negative entries,
/// shape mismatches, out-of-range parameters.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical invariant failed at runtime (route disagreement, fixed point
/// not reached, non-unit phase, ...). `invariant()` names the check.
class InvariantViolation : public std::runtime_error {
public:
    InvariantViolation(std::string invariant, const std::string &detail)
        : std::runtime_error(invariant + ": " + detail), invariant_(std::move(invariant)) {}

    const std::string &invariant() const noexcept { return invariant_; }

private:
    std::string invariant_;
};

} // namespace emc
