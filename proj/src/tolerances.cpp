#include "emc/tolerances.hpp"

#include "emc/errors.hpp"

#include <charconv>
#include <cmath>

namespace emc {

const std::vector<std::string> &Tolerances::names() {
    static const std::vector<std::string> n = {
        "stochastic_tol", "support_tol", "closure_tol",  "solver_tol",   "dense_cutoff",
        "max_iters",      "herm_tol",    "psd_tol",      "trace_tol",    "iso_tol",
        "block_cutoff",   "rank_tol",    "curve_cutoff", "support_mass_tol"};
    return n;
}

namespace {

double parse_nonneg(const std::string &name, const std::string &value) {
    double v = 0.0;
    try {
        std::size_t used = 0;
        v = std::stod(value, &used);
        if (used != value.size())
            throw std::invalid_argument(value);
    } catch (const std::exception &) {
        throw ValidationError("tolerance " + name + ": cannot parse '" + value + "'");
    }
    if (!std::isfinite(v) || v < 0.0)
        throw ValidationError("tolerance " + name + " must be finite and nonnegative, got " + value);
    return v;
}

std::size_t parse_count(const std::string &name, const std::string &value) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw ValidationError("tolerance " + name + ": expected a nonnegative integer, got '" + value + "'");
    return v;
}

} // namespace

void Tolerances::set(const std::string &name, const std::string &value) {
    if (name == "stochastic_tol") stochastic_tol = parse_nonneg(name, value);
    else if (name == "support_tol") support_tol = parse_nonneg(name, value);
    else if (name == "closure_tol") closure_tol = parse_nonneg(name, value);
    else if (name == "solver_tol") solver_tol = parse_nonneg(name, value);
    else if (name == "dense_cutoff") dense_cutoff = parse_count(name, value);
    else if (name == "max_iters") max_iters = parse_count(name, value);
    else if (name == "herm_tol") herm_tol = parse_nonneg(name, value);
    else if (name == "psd_tol") psd_tol = parse_nonneg(name, value);
    else if (name == "trace_tol") trace_tol = parse_nonneg(name, value);
    else if (name == "iso_tol") iso_tol = parse_nonneg(name, value);
    else if (name == "block_cutoff") block_cutoff = parse_count(name, value);
    else if (name == "rank_tol") rank_tol = parse_nonneg(name, value);
    else if (name == "curve_cutoff") curve_cutoff = parse_count(name, value);
    else if (name == "support_mass_tol") support_mass_tol = parse_nonneg(name, value);
    else throw ValidationError("unknown tolerance '" + name + "'");
}

double Tolerances::get(const std::string &name) const {
    if (name == "stochastic_tol") return stochastic_tol;
    if (name == "support_tol") return support_tol;
    if (name == "closure_tol") return closure_tol;
    if (name == "solver_tol") return solver_tol;
    if (name == "dense_cutoff") return static_cast<double>(dense_cutoff);
    if (name == "max_iters") return static_cast<double>(max_iters);
    if (name == "herm_tol") return herm_tol;
    if (name == "psd_tol") return psd_tol;
    if (name == "trace_tol") return trace_tol;
    if (name == "iso_tol") return iso_tol;
    if (name == "block_cutoff") return static_cast<double>(block_cutoff);
    if (name == "rank_tol") return rank_tol;
    if (name == "curve_cutoff") return static_cast<double>(curve_cutoff);
    if (name == "support_mass_tol") return support_mass_tol;
    throw ValidationError("unknown tolerance '" + name + "'");
}

} // namespace emc
