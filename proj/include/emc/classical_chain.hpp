#pragma once

// Classical stochastic matrices on labeled (possibly truncated) alphabets and
// their ergodic classification: communication classes, transient states,
// periods, cyclic subclasses and per-class stationary vectors.

#include "emc/tolerances.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace emc {

using IndexSet = std::vector<std::size_t>;

/// Ordered list of distinct symbol labels.
class Alphabet {
public:
    Alphabet() = default;
    explicit Alphabet(std::vector<std::string> labels);

    /// Labels "0", "1", ..., "n-1".
    static Alphabet numbered(std::size_t n);

    std::size_t size() const noexcept { return labels_.size(); }
    const std::vector<std::string> &labels() const noexcept { return labels_; }
    const std::string &label(std::size_t i) const { return labels_.at(i); }

    /// Index of a label; throws ValidationError if absent.
    std::size_t index_of(std::string_view label) const;

    bool operator==(const Alphabet &) const = default;

private:
    std::vector<std::string> labels_;
};

/// Nonnegative matrix with rows summing to at most one. The mass a row is
/// missing (truncation leakage) is kept in `deficiency()`, never renormalized.
class StochasticMatrix {
public:
    /// Validates entries: all finite and >= 0, each row sum <= 1 + stochastic_tol.
    /// Row sums within stochastic_tol of 1 get deficiency exactly 0.
    StochasticMatrix(Alphabet alphabet, Eigen::MatrixXd entries, const Tolerances &tol = {});

    const Alphabet &alphabet() const noexcept { return alphabet_; }
    const Eigen::MatrixXd &entries() const noexcept { return entries_; }
    const Eigen::VectorXd &deficiency() const noexcept { return deficiency_; }
    std::size_t size() const noexcept { return alphabet_.size(); }
    double operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }

    /// True when every row deficiency is zero.
    bool exact() const;

private:
    Alphabet alphabet_;
    Eigen::MatrixXd entries_;
    Eigen::VectorXd deficiency_;
};

/// Parses the inline/CSV form "a,b;c,d" (rows separated by ';' or newlines).
StochasticMatrix parse_csv_matrix(std::string_view text, const Tolerances &tol = {});

/// Parses the sparse-triplet JSON form {"n", "labels"?, "entries": [[i,j,v],...]}.
StochasticMatrix parse_json_matrix(std::string_view text, const Tolerances &tol = {});

/// Loads a matrix from a file (.json -> triplets, anything else -> CSV), or
/// treats `source` as inline CSV when no such file exists and it contains ','.
StochasticMatrix load_matrix(const std::string &source, const Tolerances &tol = {});

struct RecurrentClass {
    IndexSet states;                  // sorted
    std::size_t period = 1;
    std::vector<IndexSet> subclasses; // P maps subclasses[j] into subclasses[j+1 mod period]
    Eigen::VectorXd stationary;       // full-length, supported on `states`
};

struct ChainDecomposition {
    std::size_t size = 0;
    IndexSet transient;
    std::vector<RecurrentClass> classes;
    /// All communication classes (transient ones included) in minimal-index order.
    std::vector<IndexSet> communication;
    /// For each entry of `communication`, the index into `classes`, or -1.
    std::vector<int> recurrent_id;
};

struct StationaryDistribution {
    Alphabet alphabet;
    Eigen::VectorXd weights;
    std::vector<double> mixture;   // one coefficient per recurrent class
};

/// Strongly connected components of the support graph (edge i->j iff
/// P_ij > support_tol), ordered by minimal contained index.
std::vector<IndexSet> communication_classes(const StochasticMatrix &p, const Tolerances &tol = {});

/// Fills transient/classes/communication; periods, subclasses and stationary
/// vectors are left empty. A class is recurrent iff it is closed and carries
/// no row deficiency.
ChainDecomposition classify_states(const StochasticMatrix &p, const Tolerances &tol = {});

/// gcd of cycle lengths within a strongly connected class.
std::size_t period_of_class(const StochasticMatrix &p, const IndexSet &cls, const Tolerances &tol = {});

/// Partition of `cls` into `period` subclasses, starting with the one that
/// contains the minimal index.
std::vector<IndexSet> cyclic_subclasses(const StochasticMatrix &p, const IndexSet &cls, std::size_t period,
                                        const Tolerances &tol = {});

/// Unique stationary probability vector of P restricted to a recurrent class
/// (full-length, zero off the class).
Eigen::VectorXd stationary_distribution(const StochasticMatrix &p, const IndexSet &cls, const Tolerances &tol = {});

/// classify_states + periods + subclasses + stationary vectors.
ChainDecomposition decompose(const StochasticMatrix &p, const Tolerances &tol = {});

/// pi = sum_l alpha_l x_l. `alpha` has one entry per recurrent class, or one
/// per communication class (transient entries must then be zero).
StationaryDistribution mix_stationary(const StochasticMatrix &p, const ChainDecomposition &d,
                                      const std::vector<double> &alpha, const Tolerances &tol = {});

/// dist * P^n.
Eigen::VectorXd evolve(const StochasticMatrix &p, const Eigen::VectorXd &dist, std::size_t n);

/// ||x P - x||_1.
double fixed_point_residual(const StochasticMatrix &p, const Eigen::VectorXd &x);

} // namespace emc
