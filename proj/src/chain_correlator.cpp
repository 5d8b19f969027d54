#include "emc/chain_correlator.hpp"

#include "emc/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace emc {

namespace {

std::size_t ipow(std::size_t base, std::size_t exp) {
    std::size_t r = 1;
    for (std::size_t e = 0; e < exp; ++e) {
        if (r > (static_cast<std::size_t>(-1) / std::max<std::size_t>(base, 1)))
            return static_cast<std::size_t>(-1);
        r *= base;
    }
    return r;
}

std::size_t checked_block_dim(const EntangledOperator &op, std::size_t k) {
    if (k == 0)
        throw ValidationError("density block: k must be at least 1");
    const auto dim = ipow(op.size(), k);
    if (dim > op.tolerances().block_cutoff)
        throw ValidationError("density block: " + std::to_string(op.size()) + "^" + std::to_string(k) +
                              " exceeds block_cutoff " + std::to_string(op.tolerances().block_cutoff));
    return dim;
}

void check_measure(const EntangledOperator &op, const QuantumMeasure &q) {
    const auto n = static_cast<Eigen::Index>(op.size());
    if (q.q.rows() != n || q.q.cols() != n || q.pi.size() != n)
        throw ValidationError("quantum measure does not match the operator's alphabet");
}

DensityBlock finish_block(const EntangledOperator &op, std::size_t k, CMatrix m) {
    DensityBlock b;
    b.k = k;
    b.alphabet = op.base().alphabet();
    b.trace = m.trace().real();
    b.matrix = std::move(m);
    return b;
}

} // namespace

CMatrix matrix_unit(std::size_t n, std::size_t i, std::size_t j) {
    CMatrix e = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
    return e;
}

std::vector<std::size_t> decode_tuple(std::size_t flat, std::size_t n, std::size_t k) {
    std::vector<std::size_t> t(k);
    for (std::size_t m = k; m-- > 0;) {
        t[m] = flat % n;
        flat /= n;
    }
    return t;
}

ProductMatrix gamma_matrix(const EntangledOperator &op) {
    const auto n = op.size();
    const auto &p = op.base().entries();
    const auto &chi = op.phases();
    ProductMatrix g(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            if (p(a, b) == 0.0)
                continue;
            const Complex left = std::conj(chi(a, b)) * std::sqrt(p(a, b));
            for (std::size_t c = 0; c < n; ++c)
                for (std::size_t d = 0; d < n; ++d)
                    if (p(c, d) != 0.0)
                        g(a, b, c, d) = left * chi(c, d) * std::sqrt(p(c, d));
        }
    return g;
}

CMatrix nested_expectation(const EntangledOperator &op, const ObservableWord &word, const CMatrix &terminal) {
    if (word.empty())
        throw ValidationError("observable word must have at least one site");
    CMatrix x = terminal;
    for (auto it = word.rbegin(); it != word.rend(); ++it)
        x = op.expectation(*it, x);
    return x;
}

Complex finite_correlation(const EntangledOperator &op, const QuantumMeasure &q, const ObservableWord &word) {
    check_measure(op, q);
    const auto n = static_cast<Eigen::Index>(op.size());
    const CMatrix x = nested_expectation(op, word, CMatrix::Identity(n, n));
    return (q.q * x).trace();
}

DensityBlock density_block_recursive(const EntangledOperator &op, const QuantumMeasure &q, std::size_t k) {
    check_measure(op, q);
    const auto dim = checked_block_dim(op, k);
    const auto n = op.size();
    const auto ni = static_cast<Eigen::Index>(n);
    CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));

    // E_{e_ij}(X) = P(X)_ij e_ij, so every intermediate is a scaled matrix
    // unit and P of it is the scale times P(e_ij). The first site closes
    // with Tr(E_{D_pi}(s e_ij)) = s * sum_l pi_l P(e_ij)_ll.
    CMatrix closing(ni, ni);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const CMatrix pe = op.apply(matrix_unit(n, i, j));
            Complex t{};
            for (Eigen::Index l = 0; l < ni; ++l)
                t += q.pi(l) * pe(l, l);
            closing(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = t;
        }

    // `applied` is P of the suffix expectation for sites site+1..k-1.
    std::function<void(std::size_t, const CMatrix &, std::size_t, std::size_t, std::size_t)> sweep =
        [&](std::size_t site, const CMatrix &applied, std::size_t row, std::size_t col, std::size_t stride) {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    const Complex s = applied(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                    if (s == Complex{})
                        continue;
                    const auto r = static_cast<Eigen::Index>(row + i * stride);
                    const auto c = static_cast<Eigen::Index>(col + j * stride);
                    if (site == 0)
                        out(r, c) = s * closing(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                    else
                        sweep(site - 1, s * op.apply(matrix_unit(n, i, j)), static_cast<std::size_t>(r),
                              static_cast<std::size_t>(c), stride * n);
                }
        };
    sweep(k - 1, op.apply(CMatrix::Identity(ni, ni)), 0, 0, 1);
    return finish_block(op, k, std::move(out));
}

DensityBlock density_block_closed(const EntangledOperator &op, const QuantumMeasure &q, std::size_t k) {
    check_measure(op, q);
    const auto dim = checked_block_dim(op, k);
    const auto n = op.size();
    const ProductMatrix gamma = gamma_matrix(op);

    // P(1) from the base matrix directly.
    const auto &p = op.base().entries();
    const auto &chi = op.phases();
    CMatrix p_one = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t l = 0; l < n; ++l)
                p_one(i, j) += std::conj(chi(i, l)) * chi(j, l) * std::sqrt(p(i, l) * p(j, l));

    CMatrix out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    const auto sdim = static_cast<std::ptrdiff_t>(dim);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t r = 0; r < sdim; ++r) {
        const auto it = decode_tuple(static_cast<std::size_t>(r), n, k);
        for (std::size_t c = 0; c < dim; ++c) {
            const auto jt = decode_tuple(c, n, k);
            Complex v = q.q(jt[0], it[0]);
            for (std::size_t m = 0; m + 1 < k && v != Complex{}; ++m)
                v *= gamma(it[m], it[m + 1], jt[m], jt[m + 1]);
            v *= p_one(it[k - 1], jt[k - 1]);
            out(r, static_cast<Eigen::Index>(c)) = v;
        }
    }
    return finish_block(op, k, std::move(out));
}

DensityBlock partial_trace_site(const DensityBlock &block, Side side) {
    if (block.k < 2)
        throw ValidationError("partial_trace_site: block must span at least two sites");
    const auto n = block.alphabet.size();
    const auto small = block.dim() / n;
    CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(small), static_cast<Eigen::Index>(small));
    for (std::size_t r = 0; r < small; ++r)
        for (std::size_t c = 0; c < small; ++c) {
            Complex s{};
            for (std::size_t t = 0; t < n; ++t) {
                const auto br = side == Side::left ? t * small + r : r * n + t;
                const auto bc = side == Side::left ? t * small + c : c * n + t;
                s += block.matrix(static_cast<Eigen::Index>(br), static_cast<Eigen::Index>(bc));
            }
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = s;
        }
    DensityBlock b;
    b.k = block.k - 1;
    b.alphabet = block.alphabet;
    b.trace = out.trace().real();
    b.matrix = std::move(out);
    return b;
}

Complex shift_correlation(const EntangledOperator &op, const QuantumMeasure &q, const CMatrix &a, const CMatrix &b,
                          std::size_t gap) {
    check_measure(op, q);
    const auto n = static_cast<Eigen::Index>(op.size());
    CMatrix x = op.expectation(b, CMatrix::Identity(n, n));
    for (std::size_t s = 0; s < gap; ++s)
        x = op.markov_operator(x);
    x = op.expectation(a, x);
    return (q.q * x).trace();
}

std::vector<Complex> shift_correlation_curve(const EntangledOperator &op, const QuantumMeasure &q,
                                             const CMatrix &a, const CMatrix &b, std::size_t count) {
    check_measure(op, q);
    const auto n = static_cast<Eigen::Index>(op.size());
    std::vector<Complex> raw;
    raw.reserve(count);
    CMatrix x = op.expectation(b, CMatrix::Identity(n, n));
    for (std::size_t g = 0; g < count; ++g) {
        if (g > 0)
            x = op.markov_operator(x);
        raw.push_back((q.q * op.expectation(a, x)).trace());
    }
    return raw;
}

SpectralDiagnostics spectral_diagnostics(const DensityBlock &block, double rank_tol) {
    const CMatrix h = 0.5 * (block.matrix + block.matrix.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
    SpectralDiagnostics d;
    const auto &ev = es.eigenvalues();
    d.eigenvalues.assign(ev.data(), ev.data() + ev.size());
    std::sort(d.eigenvalues.begin(), d.eigenvalues.end(), std::greater<>());
    for (double l : d.eigenvalues) {
        if (l > rank_tol)
            ++d.rank;
        if (l > 0.0)
            d.entropy -= l * std::log(l);
    }
    return d;
}

} // namespace emc
