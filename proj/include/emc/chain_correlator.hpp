#pragma once

// Finite-dimensional distributions of the entangled chain: correlations of
// observable words, k-site density blocks (two independent assembly routes),
// partial traces and two-point shift correlations.

#include "emc/entangled_core.hpp"

#include <vector>

namespace emc {

/// One-site matrices A_1, ..., A_n; a gap is an identity matrix.
using ObservableWord = std::vector<CMatrix>;

/// k-site density block. Rows and columns are k-tuples of symbols in
/// row-major order; entry ((i_1..i_k), (j_1..j_k)) is the chain's value on
/// e_{i_1 j_1} (x) ... (x) e_{i_k j_k}.
struct DensityBlock {
    std::size_t k = 0;
    Alphabet alphabet;
    CMatrix matrix;
    double trace = 0.0;

    std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix.rows()); }
};

enum class Side { left, right };

struct SpectralDiagnostics {
    std::vector<double> eigenvalues; // descending
    std::size_t rank = 0;
    double entropy = 0.0;            // natural log
};

/// Product-indexed Gamma_{(a,b)(c,d)} = conj(chi_ab) chi_cd sqrt(P_ab P_cd),
/// taken from the base matrix (not the operator's square-root cache).
ProductMatrix gamma_matrix(const EntangledOperator &op);

/// E_{A_1} o ... o E_{A_n}(terminal).
CMatrix nested_expectation(const EntangledOperator &op, const ObservableWord &word, const CMatrix &terminal);

/// omega(A_1 (x) ... (x) A_n) = Tr(Q E_{A_1} o ... o E_{A_n}(1)).
Complex finite_correlation(const EntangledOperator &op, const QuantumMeasure &q, const ObservableWord &word);

/// Trace formula Tr(E_{D_pi} o E_{e_{i1 j1}} o ... o E_{e_{ik jk}}(1)), evaluated
/// by a depth-first sweep that shares suffixes.
DensityBlock density_block_recursive(const EntangledOperator &op, const QuantumMeasure &q, std::size_t k);

/// Entrywise closed form: Q_{j1 i1} * prod_m Gamma_{(i_m,i_{m+1})(j_m,j_{m+1})} * P(1)_{ik jk}.
DensityBlock density_block_closed(const EntangledOperator &op, const QuantumMeasure &q, std::size_t k);

DensityBlock partial_trace_site(const DensityBlock &block, Side side);

/// omega(A (x) 1^{(x) gap} (x) B) via the E_1 fast path.
Complex shift_correlation(const EntangledOperator &op, const QuantumMeasure &q, const CMatrix &a, const CMatrix &b,
                          std::size_t gap);

/// raw[n-1] = omega(A tau^n(B)) for n = 1..count, i.e. gaps 0..count-1.
std::vector<Complex> shift_correlation_curve(const EntangledOperator &op, const QuantumMeasure &q,
                                             const CMatrix &a, const CMatrix &b, std::size_t count);

SpectralDiagnostics spectral_diagnostics(const DensityBlock &block, double rank_tol = 1e-10);

/// Matrix unit e_ij over an n-letter alphabet.
CMatrix matrix_unit(std::size_t n, std::size_t i, std::size_t j);

/// Decodes a row-major tuple index into symbol indices.
std::vector<std::size_t> decode_tuple(std::size_t flat, std::size_t n, std::size_t k);

} // namespace emc
