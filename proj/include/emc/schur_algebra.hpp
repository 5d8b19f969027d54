#pragma once

// Schur (entrywise) multiplication calculus on alphabet-indexed matrices and
// on matrices indexed by pairs of symbols.
//
// Pair indices (i, j) are flattened row-major: flat = i * n + j, where n is
// the factor size. With this convention `tensor(A, B)` coincides with the
// usual Kronecker product.

#include "emc/tolerances.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstddef>

namespace emc {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Matrix over I x I, I of size `factor()`.
class ProductMatrix {
public:
    ProductMatrix() = default;
    /// Zero matrix over n x n pairs.
    explicit ProductMatrix(std::size_t n);
    /// Wraps a dense n^2 x n^2 matrix.
    ProductMatrix(std::size_t n, CMatrix data);

    std::size_t factor() const noexcept { return n_; }
    static std::size_t flat(std::size_t i, std::size_t j, std::size_t n) { return i * n + j; }

    Complex &operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
        return data_(static_cast<Eigen::Index>(flat(i, j, n_)), static_cast<Eigen::Index>(flat(k, l, n_)));
    }
    Complex operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
        return data_(static_cast<Eigen::Index>(flat(i, j, n_)), static_cast<Eigen::Index>(flat(k, l, n_)));
    }

    const CMatrix &matrix() const noexcept { return data_; }
    CMatrix &matrix() noexcept { return data_; }

private:
    std::size_t n_ = 0;
    CMatrix data_;
};

/// (A . B)_ij = A_ij B_ij.
CMatrix schur_product(const CMatrix &a, const CMatrix &b);

/// (A (x) B)_{(i,j)(k,l)} = A_ik B_jl.
ProductMatrix tensor(const CMatrix &a, const CMatrix &b);

/// Phi(A)_{(i,j)(k,l)} = A_ik delta_ij delta_kl.
ProductMatrix phi_embed(const CMatrix &a);

/// m(X)_ij = X_{(i,i)(j,j)}. Left inverse of phi_embed; m(A (x) B) = A . B.
CMatrix schur_contract(const ProductMatrix &x);

/// Schatten norm for p in {1, 2}. p = 1 uses a dense SVD and rejects
/// matrices larger than 256 x 256.
double schatten_norm(const CMatrix &t, int p);

double hermitian_defect(const CMatrix &a);

/// Smallest eigenvalue of the Hermitian part of `a`.
double min_eigenvalue(const CMatrix &a);

/// Positive semidefinite matrix with finite trace.
class TraceClassMatrix {
public:
    /// Throws InvariantViolation unless Hermitian within herm_tol and
    /// min eigenvalue >= -psd_tol.
    explicit TraceClassMatrix(CMatrix m, const Tolerances &tol = {});

    const CMatrix &matrix() const noexcept { return m_; }
    double trace() const noexcept { return trace_; }

private:
    CMatrix m_;
    double trace_ = 0.0;
};

} // namespace emc
