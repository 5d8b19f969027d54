#include "emc/schur_algebra.hpp"

#include "emc/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <string>

namespace emc {

ProductMatrix::ProductMatrix(std::size_t n)
    : n_(n), data_(CMatrix::Zero(static_cast<Eigen::Index>(n * n), static_cast<Eigen::Index>(n * n))) {}

ProductMatrix::ProductMatrix(std::size_t n, CMatrix data) : n_(n), data_(std::move(data)) {
    const auto d = static_cast<Eigen::Index>(n * n);
    if (data_.rows() != d || data_.cols() != d)
        throw ValidationError("product matrix must be " + std::to_string(d) + "x" + std::to_string(d));
}

CMatrix schur_product(const CMatrix &a, const CMatrix &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ValidationError("schur_product: shape mismatch " + std::to_string(a.rows()) + "x" +
                              std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                              std::to_string(b.cols()));
    return a.cwiseProduct(b);
}

ProductMatrix tensor(const CMatrix &a, const CMatrix &b) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
        throw ValidationError("tensor: factors must be square over the same alphabet");
    const auto n = static_cast<std::size_t>(a.rows());
    ProductMatrix x(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex{})
                continue;
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t l = 0; l < n; ++l)
                    x(i, j, k, l) = aik * b(j, l);
        }
    return x;
}

ProductMatrix phi_embed(const CMatrix &a) {
    if (a.rows() != a.cols())
        throw ValidationError("phi_embed: matrix must be square");
    const auto n = static_cast<std::size_t>(a.rows());
    ProductMatrix x(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            x(i, i, k, k) = a(i, k);
    return x;
}

CMatrix schur_contract(const ProductMatrix &x) {
    const auto n = x.factor();
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m(i, j) = x(i, i, j, j);
    return m;
}

double schatten_norm(const CMatrix &t, int p) {
    if (p == 2)
        return t.norm();
    if (p != 1)
        throw ValidationError("schatten_norm: only p = 1 and p = 2 are supported");
    if (t.rows() > 256 || t.cols() > 256)
        throw ValidationError("schatten_norm: trace norm limited to 256x256, got " + std::to_string(t.rows()) + "x" +
                              std::to_string(t.cols()));
    Eigen::JacobiSVD<CMatrix> svd(t);
    return svd.singularValues().sum();
}

double hermitian_defect(const CMatrix &a) {
    if (a.rows() != a.cols())
        return std::numeric_limits<double>::infinity();
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const CMatrix &a) {
    const CMatrix h = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

TraceClassMatrix::TraceClassMatrix(CMatrix m, const Tolerances &tol) : m_(std::move(m)) {
    const double herm = hermitian_defect(m_);
    if (herm > tol.herm_tol)
        throw InvariantViolation("trace-class hermiticity", "defect " + std::to_string(herm));
    const double lo = min_eigenvalue(m_);
    if (lo < -tol.psd_tol)
        throw InvariantViolation("trace-class positivity", "min eigenvalue " + std::to_string(lo));
    trace_ = m_.trace().real();
}

} // namespace emc
