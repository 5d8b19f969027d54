#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace emc {

/// Every numeric threshold used by the library. Defaults are the values the
/// reports and tests are pinned against; the CLI can override them by name.
struct Tolerances {
    double stochastic_tol = 1e-9;    // row sum check
    double support_tol = 1e-14;      // edge i->j exists iff entry > support_tol
    double closure_tol = 1e-12;      // outgoing mass of a closed class
    double solver_tol = 1e-10;       // ||x P - x||_1 of stationary vectors
    std::size_t dense_cutoff = 2000; // direct solve up to this many states
    std::size_t max_iters = 1000000;

    double herm_tol = 1e-10;
    double psd_tol = 1e-10;
    double trace_tol = 1e-10;
    double iso_tol = 1e-10;

    std::size_t block_cutoff = 4096; // |alphabet|^k for dense density blocks
    double rank_tol = 1e-10;

    std::size_t curve_cutoff = 512;
    double support_mass_tol = 1e-12;

    /// Names accepted by `set`, in a fixed order.
    static const std::vector<std::string> &names();

    /// Sets a tolerance by name. Throws ValidationError for unknown names
    /// or unparsable / negative values.
    void set(const std::string &name, const std::string &value);

    /// Value of a tolerance by name, as double.
    double get(const std::string &name) const;
};

} // namespace emc
