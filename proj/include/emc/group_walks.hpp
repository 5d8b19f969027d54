#pragma once

// Random walks on discrete groups. Finite groups are enumerated exactly;
// free groups and Z^d lattices are truncated to a finite window, and walk
// mass leaving the window becomes row deficiency.
//
// Elements are enumerated breadth-first from the identity, appending
// generators in their listed order (each generator followed by its inverse),
// so labels are shortlex normal forms: "e", "a", "A", "b", "B", "aa", ...
// Upper-case letters denote inverses.

#include "emc/classical_chain.hpp"
#include "emc/schur_algebra.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace emc {

enum class GroupKind { table, cyclic, dihedral, free, lattice };

using GroupKey = std::vector<int>;

class GroupSpec {
public:
    static GroupSpec cyclic(std::size_t n);
    static GroupSpec dihedral(std::size_t n); // order 2n, generators r (rotation), s (reflection)
    static GroupSpec free(std::size_t rank, std::size_t radius);
    static GroupSpec lattice(std::size_t dim, std::size_t window); // box [-window, window]^dim
    /// Finite group from a multiplication table over element indices; index 0
    /// must be the identity. Elements keep the given order.
    static GroupSpec from_table(std::vector<std::vector<std::size_t>> table, std::vector<std::string> labels = {});

    GroupKind kind() const noexcept { return kind_; }
    bool exact() const noexcept { return exact_; }
    std::size_t size() const noexcept { return alphabet_.size(); }
    const Alphabet &elements() const noexcept { return alphabet_; }
    const std::vector<std::string> &generator_letters() const noexcept { return letters_; }

    /// Product g*h, or nullopt when it leaves the enumerated window.
    std::optional<std::size_t> multiply(std::size_t g, std::size_t h) const;
    /// Inverse, or nullopt when outside the window (never for windows here).
    std::optional<std::size_t> inverse(std::size_t g) const;
    static constexpr std::size_t identity() noexcept { return 0; }

    /// Resolves an element label, or a generator word such as "aB" / "rrs"; "e" is the identity.
    std::size_t element(std::string_view word) const;

    std::string describe() const;

private:
    struct Model {
        GroupKey identity;
        std::function<GroupKey(const GroupKey &, const GroupKey &)> mult;
        std::function<GroupKey(const GroupKey &)> inv;
        std::function<bool(const GroupKey &)> in_window;
        std::vector<std::pair<std::string, GroupKey>> generators; // letter, element (inverses included)
    };
    static GroupSpec enumerate(GroupKind kind, Model model, bool exact, std::string description);

    std::optional<std::size_t> find(const GroupKey &key) const;

    GroupKind kind_ = GroupKind::table;
    bool exact_ = true;
    Alphabet alphabet_;
    std::vector<GroupKey> keys_;
    std::vector<std::string> letters_;
    Model model_;
    std::string description_;
};

/// Finitely supported probability measure, indexed by element.
struct GroupMeasure {
    std::vector<std::pair<std::size_t, double>> weights;

    /// Validates support and sum 1 within 1e-12.
    static GroupMeasure from_words(const GroupSpec &g, const std::vector<std::pair<std::string, double>> &words);
    static GroupMeasure uniform_on_generators(const GroupSpec &g);
    static GroupMeasure dirac(std::size_t element);
    /// Random positive weights on every element (exact groups) or on the
    /// generators and identity (truncated groups). Deterministic per seed.
    static GroupMeasure seeded(const GroupSpec &g, std::uint64_t seed);

    double at(std::size_t element) const;
};

enum class WalkSide { right, left };

/// right: P_{gh} = mu(g^{-1} h); left: P_{gh} = mu(g h^{-1}).
StochasticMatrix walk_matrix(const GroupSpec &g, const GroupMeasure &mu, WalkSide side, const Tolerances &tol = {});

/// Row and column sums all within `tol` of 1.
bool double_stochastic_check(const StochasticMatrix &p, double tol = 1e-10);

enum class TranslationSide { left, right };

/// lambda(g)_{xy} = delta_{x, g y}; rho(g)_{xy} = delta_{x, y g^{-1}}. Exact groups only.
Eigen::MatrixXd translation_operator(const GroupSpec &g, std::size_t element, TranslationSide side);

enum class Pairing { matched, mismatched };

/// max over samples A of ||T P(A) T^* - P(T A T^*)||_max with P the lift of
/// the `side` walk (chi = 1). Matched pairs the right walk with lambda and
/// the left walk with rho; mismatched swaps the translation.
double equivariance_residual(const GroupSpec &g, const GroupMeasure &mu, WalkSide side, std::size_t element,
                             const std::vector<CMatrix> &samples, Pairing pairing = Pairing::matched);

/// Number of failed associativity checks on `triples` seeded triples plus
/// failed identity/inverse checks over all elements (exact groups).
std::size_t group_axiom_failures(const GroupSpec &g, std::uint64_t seed, std::size_t triples);

} // namespace emc
