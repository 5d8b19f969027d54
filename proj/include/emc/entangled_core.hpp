#pragma once

// Entangled lift of a classical chain: the operator A -> P_chi(A), the
// transition expectation E(A (x) B) = A . P_chi(B), its generating isometry
// and the one-site quantum measure Q_chi(pi).

#include "emc/classical_chain.hpp"
#include "emc/schur_algebra.hpp"

#include <Eigen/Sparse>

#include <cstdint>

namespace emc {

/// Unit-modulus phases chi_ij. Defaults to all ones.
class PhaseMatrix {
public:
    static PhaseMatrix ones(std::size_t n);
    /// chi_ij = exp(i theta_ij), theta uniform on [0, 2 pi), deterministic per seed.
    static PhaseMatrix random(std::size_t n, std::uint64_t seed);
    /// Validates |chi_ij| = 1 within 1e-12.
    static PhaseMatrix from_matrix(CMatrix chi);
    /// Skips validation. Used by self-test negative controls.
    static PhaseMatrix unchecked(CMatrix chi);

    const CMatrix &matrix() const noexcept { return chi_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(chi_.rows()); }
    Complex operator()(std::size_t i, std::size_t j) const { return chi_(i, j); }

    /// max_ij ||chi_ij| - 1|.
    double modulus_defect() const;
    bool trivial() const;

private:
    explicit PhaseMatrix(CMatrix chi) : chi_(std::move(chi)) {}
    CMatrix chi_;
};

struct IdentityReport {
    bool identity_preserving = false;
    bool entangled = false;
    double diagonal_defect = 0.0;  // max_i |P(1)_ii - 1|
    double max_off_diagonal = 0.0; // max_{i != j} |P(1)_ij|
};

/// V e_i = sum_j chi_ij sqrt(P_ij) e_i (x) e_j, stored as a sparse n^2 x n matrix
/// in the row-major pair flattening.
class IsometryV {
public:
    IsometryV(std::size_t n, Eigen::SparseMatrix<Complex> v) : n_(n), v_(std::move(v)) {}

    std::size_t size() const noexcept { return n_; }
    const Eigen::SparseMatrix<Complex> &matrix() const noexcept { return v_; }

    /// V* X V.
    CMatrix sandwich(const ProductMatrix &x) const;
    /// V* V.
    CMatrix gram() const;

private:
    std::size_t n_;
    Eigen::SparseMatrix<Complex> v_;
};

struct QuantumMeasure {
    CMatrix q;
    Eigen::VectorXd pi;      // the vector Q was built from
    bool normalized = false; // pi is a probability vector
};

/// Immutable entangled operator built from a (sub-)stochastic matrix and phases.
/// P_chi(A) = W A W^*, W_ik = conj(chi_ik) sqrt(P_ik); the operator itself is
/// never materialized.
class EntangledOperator {
public:
    explicit EntangledOperator(StochasticMatrix base, const Tolerances &tol = {});
    EntangledOperator(StochasticMatrix base, PhaseMatrix phases, const Tolerances &tol = {});

    /// Replaces the square-root cache without revalidating it. Self-test hook.
    static EntangledOperator with_corrupted_cache(const EntangledOperator &op, Eigen::MatrixXd sqrt_cache);

    const StochasticMatrix &base() const noexcept { return base_; }
    const PhaseMatrix &phases() const noexcept { return phases_; }
    const Eigen::MatrixXd &sqrt_cache() const noexcept { return sqrt_; }
    const CMatrix &factor() const noexcept { return w_; }
    const Tolerances &tolerances() const noexcept { return tol_; }
    std::size_t size() const noexcept { return base_.size(); }

    /// max_ij |sqrt_cache_ij^2 - P_ij|.
    double sqrt_cache_defect() const;

    /// P_chi(A).
    CMatrix apply(const CMatrix &a) const;
    /// P_chi(1) = W W^*.
    const CMatrix &p_one() const noexcept { return p_one_; }

    IdentityReport identity_report() const;
    IsometryV build_isometry() const;

    /// E(A (x) B) = A . P_chi(B).
    CMatrix expectation(const CMatrix &a, const CMatrix &b) const;
    /// E(X) = m((id (x) P_chi)(X)) for a general pair-indexed X, evaluated as V* X V.
    CMatrix expectation(const ProductMatrix &x) const;

    /// E_1(X) = 1 . P_chi(X): diagonal, equal to diag(P d) for X = diag(d).
    CMatrix markov_operator(const CMatrix &x) const;

    /// Q_chi(pi) = W^* diag(pi) W. `pi` need not be normalized.
    QuantumMeasure quantum_measure(const Eigen::VectorXd &pi) const;
    QuantumMeasure quantum_measure(const StationaryDistribution &pi) const;

private:
    void check_square(const CMatrix &a, const char *what) const;

    StochasticMatrix base_;
    PhaseMatrix phases_;
    Tolerances tol_;
    Eigen::MatrixXd sqrt_;
    CMatrix w_;
    CMatrix p_one_;
};

} // namespace emc
