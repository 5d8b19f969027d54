#include "emc/ergodic_analyzer.hpp"

#include "emc/errors.hpp"
#include "emc/random.hpp"

#include <cmath>

namespace emc {

std::vector<std::size_t> support_classes(const ChainDecomposition &d, const StationaryDistribution &pi,
                                         const Tolerances &tol) {
    if (pi.mixture.size() != d.classes.size())
        throw ValidationError("support_classes: mixture does not match the decomposition");
    std::vector<std::size_t> out;
    for (std::size_t l = 0; l < pi.mixture.size(); ++l)
        if (pi.mixture[l] > tol.support_mass_tol)
            out.push_back(l);
    return out;
}

namespace {

double mass(const Eigen::VectorXd &pi, const IndexSet &states) {
    double s = 0.0;
    for (auto i : states)
        s += pi(static_cast<Eigen::Index>(i));
    return s;
}

} // namespace

std::vector<ErgodicComponent> ergodic_components(const ChainDecomposition &d, const StationaryDistribution &pi,
                                                 const Tolerances &tol) {
    std::vector<ErgodicComponent> out;
    for (auto l : support_classes(d, pi, tol)) {
        const auto &cls = d.classes[l];
        if (cls.subclasses.empty())
            throw ValidationError("ergodic_components: decomposition lacks cyclic subclasses");
        ErgodicComponent c;
        c.class_id = l;
        c.weight = mass(pi.weights, cls.states);
        c.period = cls.period;
        c.reference_subclass = 0; // contains the class's minimal index
        c.reference_weight = mass(pi.weights, cls.subclasses[0]);
        out.push_back(c);
    }
    return out;
}

CMatrix projection(std::size_t n, const IndexSet &states) {
    CMatrix p = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (auto i : states)
        p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
    return p;
}

Complex component_correlation(const EntangledOperator &op, const QuantumMeasure &q, const ChainDecomposition &d,
                              const ErgodicComponent &c, const ObservableWord &word, ComponentState which) {
    if (c.class_id >= d.classes.size())
        throw ValidationError("component_correlation: unknown class");
    if (word.size() > op.tolerances().curve_cutoff)
        throw ValidationError("component_correlation: word longer than curve_cutoff");
    const auto &cls = d.classes[c.class_id];
    const auto n = op.size();
    if (which == ComponentState::omega) {
        const CMatrix x = nested_expectation(op, word, projection(n, cls.states));
        return (q.q * x).trace() / c.weight;
    }
    const auto target = (c.reference_subclass + word.size()) % c.period;
    const CMatrix x = nested_expectation(op, word, projection(n, cls.subclasses[target]));
    return (q.q * x).trace() / c.reference_weight;
}

Complex shifted_phi(const EntangledOperator &op, const QuantumMeasure &q, const ChainDecomposition &d,
                    const ErgodicComponent &c, const ObservableWord &word, std::size_t shift) {
    const auto n = static_cast<Eigen::Index>(op.size());
    ObservableWord shifted(shift, CMatrix::Identity(n, n));
    shifted.insert(shifted.end(), word.begin(), word.end());
    return component_correlation(op, q, d, c, shifted, ComponentState::phi);
}

namespace {

Complex phi_average(const EntangledOperator &op, const QuantumMeasure &q, const ChainDecomposition &d,
                    const ErgodicComponent &c, const ObservableWord &w) {
    Complex s{};
    for (std::size_t k = 1; k <= c.period; ++k)
        s += shifted_phi(op, q, d, c, w, k);
    return s / static_cast<double>(c.period);
}

} // namespace

double decomposition_check(const EntangledOperator &op, const QuantumMeasure &q, const ChainDecomposition &d,
                           const StationaryDistribution &pi, const std::vector<ObservableWord> &words) {
    const auto comps = ergodic_components(d, pi, op.tolerances());
    double worst = 0.0;
    for (const auto &w : words) {
        const Complex lhs = finite_correlation(op, q, w);
        Complex rhs{};
        for (const auto &c : comps)
            rhs += c.weight * phi_average(op, q, d, c, w);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

double phi_average_check(const EntangledOperator &op, const QuantumMeasure &q, const ChainDecomposition &d,
                         const StationaryDistribution &pi, const std::vector<ObservableWord> &words) {
    double worst = 0.0;
    for (const auto &c : ergodic_components(d, pi, op.tolerances()))
        for (const auto &w : words) {
            const Complex omega = component_correlation(op, q, d, c, w, ComponentState::omega);
            worst = std::max(worst, std::abs(omega - phi_average(op, q, d, c, w)));
        }
    return worst;
}

std::vector<ObservableWord> standard_test_words(std::size_t n, std::uint64_t seed) {
    std::vector<ObservableWord> words;
    if (n <= 4) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                words.push_back({matrix_unit(n, i, j)});
                for (std::size_t k = 0; k < n; ++k)
                    for (std::size_t l = 0; l < n; ++l)
                        words.push_back({matrix_unit(n, i, j), matrix_unit(n, k, l)});
            }
        return words;
    }
    Rng rng(seed);
    const auto ni = static_cast<Eigen::Index>(n);
    for (int w = 0; w < 20; ++w) {
        const auto len = 1 + uniform_index(rng, 3);
        ObservableWord word;
        for (std::uint64_t s = 0; s < len; ++s) {
            CMatrix a(ni, ni);
            for (Eigen::Index i = 0; i < ni; ++i)
                for (Eigen::Index j = 0; j < ni; ++j)
                    a(i, j) = Complex(uniform(rng, -1, 1), uniform(rng, -1, 1));
            word.push_back(0.5 * (a + a.adjoint()));
        }
        words.push_back(std::move(word));
    }
    return words;
}

CesaroCurve cesaro_curve(const EntangledOperator &op, const QuantumMeasure &q, const CMatrix &a, const CMatrix &b,
                         std::size_t count) {
    if (count > op.tolerances().curve_cutoff)
        throw ValidationError("cesaro_curve: " + std::to_string(count) + " points exceed curve_cutoff " +
                              std::to_string(op.tolerances().curve_cutoff));
    CesaroCurve c;
    c.raw = shift_correlation_curve(op, q, a, b, count);
    c.cesaro.reserve(count);
    Complex running{};
    for (std::size_t k = 0; k < count; ++k) {
        running += c.raw[k];
        c.cesaro.push_back(running / static_cast<double>(k + 1));
    }
    return c;
}

CurveEvidence curve_evidence(const EntangledOperator &op, const QuantumMeasure &q, const ChainDecomposition &d,
                             const StationaryDistribution &pi, const CMatrix &a, const CMatrix &b,
                             std::size_t count) {
    CurveEvidence e;
    e.curve = cesaro_curve(op, q, a, b, count);
    e.product = finite_correlation(op, q, {a}) * finite_correlation(op, q, {b});
    e.cesaro_limit = Complex{};
    for (const auto &c : ergodic_components(d, pi, op.tolerances()))
        e.cesaro_limit += c.weight * component_correlation(op, q, d, c, {a}, ComponentState::omega) *
                          component_correlation(op, q, d, c, {b}, ComponentState::omega);
    e.class_variance = e.cesaro_limit - e.product;
    return e;
}

double fitted_decay_rate(const std::vector<double> &residuals, double noise_floor) {
    std::size_t usable = 0;
    while (usable < residuals.size() && residuals[usable] > noise_floor)
        ++usable;
    const std::size_t start = usable / 2;
    if (usable - start < 2)
        return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto cnt = static_cast<double>(usable - start);
    for (std::size_t k = start; k < usable; ++k) {
        const double x = static_cast<double>(k + 1);
        const double y = std::log(residuals[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    return std::exp(slope);
}

ClusterVerdict verdict(const ChainDecomposition &d, const StationaryDistribution &pi,
                       const std::vector<CurveEvidence> &curves, const Tolerances &tol) {
    ClusterVerdict v;
    v.support = support_classes(d, pi, tol);
    v.class_count = v.support.size();
    for (auto l : v.support) {
        v.periods.push_back(d.classes[l].period);
        v.weights.push_back(pi.mixture[l]);
    }
    v.ergodic = v.class_count == 1;
    v.strongly_clustering = v.ergodic && v.periods.front() == 1;

    if (!curves.empty() && !curves.front().curve.raw.empty()) {
        const auto &e = curves.front();
        const auto &raw = e.curve.raw;
        v.raw_residual = std::abs(raw.back() - e.product);
        v.cesaro_residual = std::abs(e.curve.cesaro.back() - e.product);
        v.cesaro_vs_limit = std::abs(e.curve.cesaro.back() - e.cesaro_limit);
        v.class_variance = std::abs(e.class_variance);
        std::vector<double> r(raw.size());
        for (std::size_t k = 0; k < raw.size(); ++k)
            r[k] = std::abs(raw[k] - e.product);
        v.fitted_rate = fitted_decay_rate(r, 1e-12 * std::max(1.0, std::abs(e.product)));
    }
    return v;
}

} // namespace emc
