#include "emc/entangled_core.hpp"

#include "emc/errors.hpp"
#include "emc/random.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace emc {

// ------------------------------------------------------------- PhaseMatrix

PhaseMatrix PhaseMatrix::ones(std::size_t n) { return PhaseMatrix(CMatrix::Ones(n, n)); }

PhaseMatrix PhaseMatrix::random(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    CMatrix chi(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            chi(i, j) = std::polar(1.0, 2.0 * std::numbers::pi * uniform01(rng));
    return PhaseMatrix(std::move(chi));
}

PhaseMatrix PhaseMatrix::from_matrix(CMatrix chi) {
    if (chi.rows() != chi.cols())
        throw ValidationError("phase matrix must be square");
    PhaseMatrix p(std::move(chi));
    const double defect = p.modulus_defect();
    if (defect > 1e-12)
        throw InvariantViolation("phase modulus", "max ||chi_ij| - 1| = " + std::to_string(defect));
    return p;
}

PhaseMatrix PhaseMatrix::unchecked(CMatrix chi) { return PhaseMatrix(std::move(chi)); }

double PhaseMatrix::modulus_defect() const {
    if (chi_.size() == 0)
        return 0.0;
    return (chi_.cwiseAbs().array() - 1.0).abs().maxCoeff();
}

bool PhaseMatrix::trivial() const { return (chi_.array() == Complex(1.0, 0.0)).all(); }

// --------------------------------------------------------------- IsometryV

CMatrix IsometryV::sandwich(const ProductMatrix &x) const {
    if (x.factor() != n_)
        throw ValidationError("isometry: product matrix factor size mismatch");
    const CMatrix xv = x.matrix() * v_;
    return CMatrix(v_.adjoint() * xv);
}

CMatrix IsometryV::gram() const { return CMatrix(v_.adjoint() * v_); }

// -------------------------------------------------------- EntangledOperator

EntangledOperator::EntangledOperator(StochasticMatrix base, const Tolerances &tol)
    : EntangledOperator(base, PhaseMatrix::ones(base.size()), tol) {}

EntangledOperator::EntangledOperator(StochasticMatrix base, PhaseMatrix phases, const Tolerances &tol)
    : base_(std::move(base)), phases_(std::move(phases)), tol_(tol) {
    if (phases_.size() != base_.size())
        throw ValidationError("phase matrix is " + std::to_string(phases_.size()) + "x" +
                              std::to_string(phases_.size()) + " but the chain has " +
                              std::to_string(base_.size()) + " states");
    sqrt_ = base_.entries().cwiseSqrt();
    w_ = phases_.matrix().conjugate().cwiseProduct(sqrt_.cast<Complex>());
    p_one_ = w_ * w_.adjoint();
}

EntangledOperator EntangledOperator::with_corrupted_cache(const EntangledOperator &op, Eigen::MatrixXd sqrt_cache) {
    EntangledOperator out = op;
    out.sqrt_ = std::move(sqrt_cache);
    out.w_ = out.phases_.matrix().conjugate().cwiseProduct(out.sqrt_.cast<Complex>());
    out.p_one_ = out.w_ * out.w_.adjoint();
    return out;
}

double EntangledOperator::sqrt_cache_defect() const {
    return (sqrt_.cwiseProduct(sqrt_) - base_.entries()).cwiseAbs().maxCoeff();
}

void EntangledOperator::check_square(const CMatrix &a, const char *what) const {
    const auto n = static_cast<Eigen::Index>(size());
    if (a.rows() != n || a.cols() != n)
        throw ValidationError(std::string(what) + ": expected " + std::to_string(n) + "x" + std::to_string(n) +
                              " matrix, got " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
}

CMatrix EntangledOperator::apply(const CMatrix &a) const {
    check_square(a, "entangled_apply");
    return w_ * a * w_.adjoint();
}

IdentityReport EntangledOperator::identity_report() const {
    IdentityReport r;
    const auto n = p_one_.rows();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j)
                r.diagonal_defect = std::max(r.diagonal_defect, std::abs(p_one_(i, i) - 1.0));
            else
                r.max_off_diagonal = std::max(r.max_off_diagonal, std::abs(p_one_(i, j)));
        }
    r.identity_preserving = r.diagonal_defect <= tol_.iso_tol;
    r.entangled = r.max_off_diagonal > tol_.iso_tol;
    return r;
}

IsometryV EntangledOperator::build_isometry() const {
    const auto n = size();
    std::vector<Eigen::Triplet<Complex>> trips;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (sqrt_(i, j) != 0.0)
                trips.emplace_back(static_cast<int>(ProductMatrix::flat(i, j, n)), static_cast<int>(i),
                                   phases_(i, j) * sqrt_(i, j));
    Eigen::SparseMatrix<Complex> v(static_cast<Eigen::Index>(n * n), static_cast<Eigen::Index>(n));
    v.setFromTriplets(trips.begin(), trips.end());
    return IsometryV(n, std::move(v));
}

CMatrix EntangledOperator::expectation(const CMatrix &a, const CMatrix &b) const {
    check_square(a, "transition_expectation");
    return schur_product(a, apply(b));
}

CMatrix EntangledOperator::expectation(const ProductMatrix &x) const { return build_isometry().sandwich(x); }

CMatrix EntangledOperator::markov_operator(const CMatrix &x) const {
    check_square(x, "markov_operator");
    const CVector d = (w_ * x).cwiseProduct(w_.conjugate()).rowwise().sum();
    return d.asDiagonal();
}

QuantumMeasure EntangledOperator::quantum_measure(const Eigen::VectorXd &pi) const {
    if (pi.size() != static_cast<Eigen::Index>(size()))
        throw ValidationError("quantum_measure: vector length " + std::to_string(pi.size()) + " != " +
                              std::to_string(size()));
    for (Eigen::Index i = 0; i < pi.size(); ++i)
        if (!(pi(i) >= 0.0) || !std::isfinite(pi(i)))
            throw ValidationError("quantum_measure: entry " + std::to_string(i) + " is negative or not finite");
    QuantumMeasure m;
    m.q = w_.adjoint() * pi.cast<Complex>().asDiagonal() * w_;
    m.pi = pi;
    m.normalized = std::abs(pi.sum() - 1.0) <= tol_.stochastic_tol;
    return m;
}

QuantumMeasure EntangledOperator::quantum_measure(const StationaryDistribution &pi) const {
    return quantum_measure(pi.weights);
}

} // namespace emc
