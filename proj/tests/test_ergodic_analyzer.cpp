#include "emc/ergodic_analyzer.hpp"
#include "emc/errors.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace emc;
using emc::testing::make_chain;

namespace {

struct Setup {
    StochasticMatrix p;
    ChainDecomposition d;
    StationaryDistribution pi;
    EntangledOperator op;
    QuantumMeasure q;
};

Setup setup(const StochasticMatrix &p, std::vector<double> alpha = {}, const PhaseMatrix *chi = nullptr) {
    auto d = decompose(p);
    if (alpha.empty())
        alpha.assign(d.classes.size(), 1.0 / static_cast<double>(d.classes.size()));
    auto pi = mix_stationary(p, d, alpha);
    EntangledOperator op = chi ? EntangledOperator(p, *chi) : EntangledOperator(p);
    auto q = op.quantum_measure(pi);
    return {p, std::move(d), pi, op, q};
}

StochasticMatrix two_absorbing() { return make_chain({{1, 0}, {0, 1}}); }
StochasticMatrix flip() { return make_chain({{0, 1}, {1, 0}}); }
StochasticMatrix symmetric() { return make_chain({{0.7, 0.3}, {0.3, 0.7}}); }

// 0,1 transient; {2,3} period 2; {4,5,6} aperiodic.
StochasticMatrix mixed_chain() {
    return make_chain({{0.2, 0.2, 0.3, 0.0, 0.3, 0.0, 0.0},
                       {0.1, 0.1, 0.0, 0.4, 0.0, 0.2, 0.2},
                       {0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0},
                       {0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0},
                       {0.0, 0.0, 0.0, 0.0, 0.1, 0.6, 0.3},
                       {0.0, 0.0, 0.0, 0.0, 0.5, 0.0, 0.5},
                       {0.0, 0.0, 0.0, 0.0, 0.3, 0.3, 0.4}});
}

// Period 3 with non-singleton subclasses {0,1} -> {2} -> {3,4} -> {0,1}.
StochasticMatrix period_three() {
    return make_chain({{0, 0, 1, 0, 0},
                       {0, 0, 1, 0, 0},
                       {0, 0, 0, 0.4, 0.6},
                       {0.5, 0.5, 0, 0, 0},
                       {0.9, 0.1, 0, 0, 0}});
}

} // namespace

TEST_CASE("support classes") {
    auto s = setup(symmetric());
    CHECK(support_classes(s.d, s.pi) == std::vector<std::size_t>{0});
    s = setup(two_absorbing());
    CHECK(support_classes(s.d, s.pi) == std::vector<std::size_t>{0, 1});
    s = setup(two_absorbing(), {1.0, 0.0});
    CHECK(support_classes(s.d, s.pi) == std::vector<std::size_t>{0});
    const auto comps = ergodic_components(s.d, s.pi);
    REQUIRE(comps.size() == 1);
    CHECK(comps[0].weight == 1.0);
}

TEST_CASE("component correlations") {
    const CMatrix e00 = matrix_unit(2, 0, 0), e11 = matrix_unit(2, 1, 1);
    auto s = setup(two_absorbing());
    auto comps = ergodic_components(s.d, s.pi);
    REQUIRE(comps.size() == 2);
    CHECK(std::abs(component_correlation(s.op, s.q, s.d, comps[0], {e00}, ComponentState::omega) - 1.0) <= 1e-12);
    CHECK(std::abs(component_correlation(s.op, s.q, s.d, comps[0], {e11}, ComponentState::omega)) <= 1e-12);
    CHECK(std::abs(component_correlation(s.op, s.q, s.d, comps[1], {e11, e11}, ComponentState::omega) - 1.0) <= 1e-12);

    s = setup(symmetric());
    comps = ergodic_components(s.d, s.pi);
    for (const auto &w : standard_test_words(2))
        CHECK(std::abs(component_correlation(s.op, s.q, s.d, comps[0], w, ComponentState::omega) -
                       finite_correlation(s.op, s.q, w)) <= 1e-12);

    // Period 2: phi localizes the first site on the reference subclass {0}.
    s = setup(flip());
    comps = ergodic_components(s.d, s.pi);
    REQUIRE(comps[0].period == 2);
    CHECK(std::abs(component_correlation(s.op, s.q, s.d, comps[0], {e00}, ComponentState::phi) - 1.0) <= 1e-12);
    CHECK(std::abs(component_correlation(s.op, s.q, s.d, comps[0], {e11}, ComponentState::phi)) <= 1e-12);
    CHECK(std::abs(component_correlation(s.op, s.q, s.d, comps[0], {e00, e11}, ComponentState::phi) - 1.0) <= 1e-12);
    CHECK(std::abs(shifted_phi(s.op, s.q, s.d, comps[0], {e00}, 1)) <= 1e-12);
    CHECK(std::abs(shifted_phi(s.op, s.q, s.d, comps[0], {e11}, 1) - 1.0) <= 1e-12);
    CHECK(std::abs(shifted_phi(s.op, s.q, s.d, comps[0], {e00}, 2) - 1.0) <= 1e-12);
}

TEST_CASE("phi on a period-3 class matches the classical cyclic oracle") {
    const auto s = setup(period_three());
    const auto comps = ergodic_components(s.d, s.pi);
    REQUIRE(comps.size() == 1);
    REQUIRE(comps[0].period == 3);
    const Eigen::MatrixXd m = s.p.entries();
    // Classical phi: start in subclass {0,1} with pi renormalized there.
    Eigen::VectorXd start = Eigen::VectorXd::Zero(5);
    start(0) = s.pi.weights(0);
    start(1) = s.pi.weights(1);
    start /= start.sum();
    for (std::size_t shift = 0; shift < 6; ++shift) {
        Eigen::RowVectorXd dist = start.transpose();
        for (std::size_t t = 0; t < shift; ++t)
            dist = dist * m;
        for (int i = 0; i < 5; ++i) {
            const Complex v = shifted_phi(s.op, s.q, s.d, comps[0], {matrix_unit(5, i, i)}, shift);
            CHECK(std::abs(v - dist(i)) <= 1e-12);
        }
    }
}

TEST_CASE("mixture decomposition is exact") {
    for (const auto &p : {symmetric(), two_absorbing(), flip(), mixed_chain(), period_three()}) {
        const auto s = setup(p);
        const auto words = standard_test_words(p.size(), 5);
        CHECK(decomposition_check(s.op, s.q, s.d, s.pi, words) <= 1e-10);
        CHECK(phi_average_check(s.op, s.q, s.d, s.pi, words) <= 1e-10);
    }
    const auto chi = PhaseMatrix::random(7, 17);
    const auto s = setup(mixed_chain(), {0.3, 0.7}, &chi);
    const auto words = standard_test_words(7, 6);
    CHECK(words.size() == 20);
    CHECK(decomposition_check(s.op, s.q, s.d, s.pi, words) <= 1e-10);
    CHECK(phi_average_check(s.op, s.q, s.d, s.pi, words) <= 1e-10);
}

TEST_CASE("standard test words") {
    CHECK(standard_test_words(2).size() == 4 + 16);
    CHECK(standard_test_words(3).size() == 9 + 81);
    const auto a = standard_test_words(5, 3), b = standard_test_words(5, 3);
    REQUIRE(a.size() == 20);
    for (std::size_t w = 0; w < a.size(); ++w) {
        REQUIRE(a[w].size() == b[w].size());
        CHECK(a[w].size() <= 3);
        for (std::size_t s = 0; s < a[w].size(); ++s) {
            CHECK(a[w][s] == b[w][s]);
            CHECK(hermitian_defect(a[w][s]) == 0.0);
        }
    }
}

TEST_CASE("cesaro curves") {
    auto s = setup(symmetric());
    const CMatrix one = CMatrix::Identity(2, 2), e00 = matrix_unit(2, 0, 0);
    auto c = cesaro_curve(s.op, s.q, one, one, 50);
    for (std::size_t k = 0; k < 50; ++k) {
        CHECK(std::abs(c.raw[k] - 1.0) <= 1e-12);
        CHECK(std::abs(c.cesaro[k] - 1.0) <= 1e-12);
    }
    c = cesaro_curve(s.op, s.q, e00, e00, 200);
    CHECK(std::abs(c.raw.back() - 0.25) <= 1e-6);
    // Classical oracle: raw_k = 0.25 + 0.25 * 0.4^k, so C_N carries a 1/N transient.
    double partial = 0.0;
    for (std::size_t k = 1; k <= 200; ++k) {
        partial += 0.25 * std::pow(0.4, k);
        CHECK(std::abs(c.cesaro[k - 1] - (0.25 + partial / static_cast<double>(k))) <= 1e-12);
    }

    s = setup(flip());
    c = cesaro_curve(s.op, s.q, e00, e00, 200);
    // omega(e00 tau^k e00) = 1/2 for even k, 0 for odd k.
    for (std::size_t k = 1; k <= 200; ++k)
        CHECK(std::abs(c.raw[k - 1] - (k % 2 == 0 ? 0.5 : 0.0)) <= 1e-12);
    CHECK(std::abs(c.cesaro.back() - 0.25) <= 1e-6);
    CHECK_THROWS_AS(cesaro_curve(s.op, s.q, e00, e00, 513), ValidationError);
}

TEST_CASE("class variance for two absorbing states") {
    const auto s = setup(two_absorbing());
    const CMatrix a = matrix_unit(2, 0, 0);
    CMatrix b = CMatrix::Zero(2, 2);
    b(0, 0) = 2.0;
    b(1, 1) = -1.0;
    const auto e = curve_evidence(s.op, s.q, s.d, s.pi, a, b, 100);
    // 0.25 (omega_a(A) - omega_b(A)) (omega_a(B) - omega_b(B)) = 0.25 * 1 * 3.
    CHECK(std::abs(e.class_variance - 0.75) <= 1e-12);
    CHECK(std::abs(e.curve.cesaro.back() - e.product - 0.75) <= 1e-6);
    CHECK(std::abs(e.curve.cesaro.back() - e.cesaro_limit) <= 1e-6);
}

TEST_CASE("fitted decay rate") {
    std::vector<double> r;
    for (int k = 1; k <= 40; ++k)
        r.push_back(3.0 * std::pow(0.6, k));
    CHECK(fitted_decay_rate(r, 1e-12) == doctest::Approx(0.6).epsilon(1e-9));
    r.assign(10, 0.0);
    CHECK(fitted_decay_rate(r, 1e-12) == 0.0);
}

TEST_CASE("verdicts") {
    const CMatrix e00 = matrix_unit(2, 0, 0);
    auto s = setup(two_absorbing());
    auto v = verdict(s.d, s.pi, {curve_evidence(s.op, s.q, s.d, s.pi, e00, e00, 100)});
    CHECK_FALSE(v.ergodic);
    CHECK_FALSE(v.strongly_clustering);
    CHECK(v.class_count == 2);
    REQUIRE(v.class_variance.has_value());
    CHECK(*v.class_variance == doctest::Approx(0.25));

    s = setup(flip());
    v = verdict(s.d, s.pi, {curve_evidence(s.op, s.q, s.d, s.pi, e00, e00, 200)});
    CHECK(v.ergodic);
    CHECK_FALSE(v.strongly_clustering);
    CHECK(v.periods == std::vector<std::size_t>{2});
    CHECK(*v.raw_residual == doctest::Approx(0.25));
    CHECK(*v.cesaro_residual <= 1e-6);

    s = setup(symmetric());
    v = verdict(s.d, s.pi, {curve_evidence(s.op, s.q, s.d, s.pi, e00, e00, 256)});
    CHECK(v.ergodic);
    CHECK(v.strongly_clustering);
    CHECK(std::abs(*v.fitted_rate - 0.4) <= 0.02);
    CHECK(*v.raw_residual <= 1e-4);

    v = verdict(s.d, s.pi, {});
    CHECK_FALSE(v.fitted_rate.has_value());
}

TEST_CASE("verdict monotonicity and fitted rate against the spectral oracle") {
    Rng rng(51);
    for (int t = 0; t < 20; ++t) {
        const std::size_t n = 2 + uniform_index(rng, 4);
        const StochasticMatrix p(Alphabet::numbered(n), emc::testing::random_stochastic(n, rng, 0.5));
        const auto s = setup(p);
        const auto v = verdict(s.d, s.pi, {});
        CHECK((!v.strongly_clustering || v.ergodic));
        CHECK(v.ergodic == (s.d.classes.size() == 1));
    }
    // Two-state chain with a = 0.2, b = 0.5: second eigenvalue 0.3.
    const auto s = setup(make_chain({{0.8, 0.2}, {0.5, 0.5}}));
    const auto v = verdict(s.d, s.pi, {curve_evidence(s.op, s.q, s.d, s.pi, matrix_unit(2, 0, 0),
                                                      matrix_unit(2, 1, 1), 128)});
    CHECK(std::abs(*v.fitted_rate - 0.3) <= 0.02);
}
