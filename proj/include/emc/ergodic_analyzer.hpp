#pragma once

// Ergodic decomposition of the entangled chain into components omega_l (one
// per recurrent class charged by pi) and their phase-localized refinements
// phi_l, plus the structural ergodicity / strong-clustering verdict.

#include "emc/chain_correlator.hpp"

#include <optional>

namespace emc {

/// One recurrent class lambda with alpha_lambda > support_mass_tol.
struct ErgodicComponent {
    std::size_t class_id = 0;
    double weight = 0.0;               // pi(p_lambda)
    std::size_t period = 1;
    std::size_t reference_subclass = 0; // index into the class's subclasses
    double reference_weight = 0.0;     // pi(reference subclass)
};

enum class ComponentState { omega, phi };

/// Classes charged by the mixture (alpha > support_mass_tol), ascending.
std::vector<std::size_t> support_classes(const ChainDecomposition &d, const StationaryDistribution &pi,
                                         const Tolerances &tol = {});

std::vector<ErgodicComponent> ergodic_components(const ChainDecomposition &d, const StationaryDistribution &pi,
                                                 const Tolerances &tol = {});

/// Diagonal projection onto a set of states.
CMatrix projection(std::size_t n, const IndexSet &states);

/// omega_l(word) = pi(p_l)^{-1} Tr(Q E_{A_1} o ... o E_{A_n}(p_l)); for phi_l the
/// terminal projection is the subclass reached n steps after the reference
/// subclass, normalized by pi(reference subclass). phi_l therefore localizes
/// the first site of the word on the reference subclass.
Complex component_correlation(const EntangledOperator &op, const QuantumMeasure &q, const ChainDecomposition &d,
                              const ErgodicComponent &c, const ObservableWord &word, ComponentState which);

/// phi_l o tau^s: the word preceded by s identity sites.
Complex shifted_phi(const EntangledOperator &op, const QuantumMeasure &q, const ChainDecomposition &d,
                    const ErgodicComponent &c, const ObservableWord &word, std::size_t shift);

/// max over words of |omega(w) - sum_l (pi(p_l)/m_l) sum_{s=1..m_l} phi_l(tau^s w)|.
double decomposition_check(const EntangledOperator &op, const QuantumMeasure &q, const ChainDecomposition &d,
                           const StationaryDistribution &pi, const std::vector<ObservableWord> &words);

/// max over components and words of |omega_l(w) - (1/m_l) sum_s phi_l(tau^s w)|.
double phi_average_check(const EntangledOperator &op, const QuantumMeasure &q, const ChainDecomposition &d,
                         const StationaryDistribution &pi, const std::vector<ObservableWord> &words);

/// Standard test-word suite: every one- and two-site word of matrix units for
/// alphabets of size <= 4, otherwise 20 seeded random Hermitian words.
std::vector<ObservableWord> standard_test_words(std::size_t n, std::uint64_t seed = 0);

struct CesaroCurve {
    std::vector<Complex> raw;    // raw[k-1] = omega(A tau^k(B)), k = 1..N
    std::vector<Complex> cesaro; // cesaro[N-1] = (1/N) sum_{k<=N} raw
};

CesaroCurve cesaro_curve(const EntangledOperator &op, const QuantumMeasure &q, const CMatrix &a, const CMatrix &b,
                         std::size_t count);

/// Numerical evidence attached to a verdict for one observable pair.
struct CurveEvidence {
    CesaroCurve curve;
    Complex product;           // omega(A) omega(B)
    Complex cesaro_limit;      // sum_l w_l omega_l(A) omega_l(B)
    Complex class_variance;    // cesaro_limit - product
};

CurveEvidence curve_evidence(const EntangledOperator &op, const QuantumMeasure &q, const ChainDecomposition &d,
                             const StationaryDistribution &pi, const CMatrix &a, const CMatrix &b,
                             std::size_t count);

/// Least-squares slope of log r_k against k over the last half of the points
/// above the noise floor, returned as exp(slope). 0 when fewer than two
/// points remain.
double fitted_decay_rate(const std::vector<double> &residuals, double noise_floor);

struct ClusterVerdict {
    bool ergodic = false;
    bool strongly_clustering = false;
    std::size_t class_count = 0;
    std::vector<std::size_t> support;
    std::vector<std::size_t> periods;
    std::vector<double> weights;
    // Evidence; absent when no curve was supplied.
    std::optional<double> raw_residual;     // |raw_N - omega(A)omega(B)|
    std::optional<double> cesaro_residual;  // |C_N - omega(A)omega(B)|
    std::optional<double> cesaro_vs_limit;  // |C_N - cesaro_limit|
    std::optional<double> class_variance;   // |cesaro_limit - omega(A)omega(B)|
    std::optional<double> fitted_rate;
};

/// ergodic iff exactly one class is charged; strongly clustering iff in
/// addition that class is aperiodic. Curves are corroboration only.
ClusterVerdict verdict(const ChainDecomposition &d, const StationaryDistribution &pi,
                       const std::vector<CurveEvidence> &curves, const Tolerances &tol = {});

} // namespace emc
