#include "emc/entangled_core.hpp"
#include "emc/errors.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace emc;
using emc::testing::make_chain;
using emc::testing::random_complex;

namespace {

double max_abs(const CMatrix &m) { return m.cwiseAbs().maxCoeff(); }

EntangledOperator random_operator(std::size_t n, Rng &rng, bool phased, double sparsity = 0.3) {
    StochasticMatrix p(Alphabet::numbered(n), emc::testing::random_stochastic(n, rng, sparsity));
    return phased ? EntangledOperator(p, PhaseMatrix::random(n, rng())) : EntangledOperator(p);
}

} // namespace

TEST_CASE("phase matrices") {
    CHECK(PhaseMatrix::ones(3).trivial());
    const auto r = PhaseMatrix::random(4, 7);
    CHECK(r.modulus_defect() <= 1e-12);
    CHECK(PhaseMatrix::random(4, 7).matrix() == r.matrix());
    CHECK(PhaseMatrix::random(4, 8).matrix() != r.matrix());
    CMatrix bad = CMatrix::Ones(2, 2);
    bad(0, 1) = 1.1;
    CHECK_THROWS_AS(PhaseMatrix::from_matrix(bad), InvariantViolation);
    CHECK(PhaseMatrix::unchecked(bad).modulus_defect() == doctest::Approx(0.1));
    CHECK_THROWS_AS(EntangledOperator(make_chain({{1}}), PhaseMatrix::ones(2)), ValidationError);
}

TEST_CASE("entangled_apply examples") {
    Rng rng(31);
    const EntangledOperator id(make_chain({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
    const CMatrix a = random_complex(3, rng);
    CHECK(max_abs(id.apply(a) - a) == 0.0);

    // P(1)_ij = sum_k sqrt(P_ik P_jk) = 2 * sqrt(0.25) = 1.
    const EntangledOperator half(make_chain({{0.5, 0.5}, {0.5, 0.5}}));
    CHECK(max_abs(half.apply(CMatrix::Identity(2, 2)) - CMatrix::Ones(2, 2)) <= 1e-15);
    CHECK_THROWS_AS(half.apply(CMatrix::Identity(3, 3)), ValidationError);
}

TEST_CASE("factorized form matches the quadruple sum; entries bounded by the operator norm") {
    Rng rng(32);
    for (int t = 0; t < 25; ++t) {
        const auto op = random_operator(4, rng, t % 2 == 1);
        const CMatrix a = random_complex(4, rng);
        const CMatrix direct =
            emc::testing::entangled_by_definition(op.base().entries(), op.phases().matrix(), a);
        CHECK(max_abs(op.apply(a) - direct) <= 1e-12);
        const double opnorm = Eigen::JacobiSVD<CMatrix>(a).singularValues()(0);
        CHECK(max_abs(op.apply(a)) <= opnorm + 1e-12);
    }
}

TEST_CASE("schur identity report") {
    auto r = EntangledOperator(make_chain({{1, 0}, {0, 1}})).identity_report();
    CHECK(r.identity_preserving);
    CHECK_FALSE(r.entangled);
    r = EntangledOperator(make_chain({{0.5, 0.5}, {0.5, 0.5}})).identity_report();
    CHECK(r.identity_preserving);
    CHECK(r.entangled);
    r = EntangledOperator(make_chain({{0, 1}, {1, 0}})).identity_report();
    CHECK(r.identity_preserving);
    CHECK_FALSE(r.entangled);
    r = EntangledOperator(parse_csv_matrix("0.3,0.3;0.2,0.2")).identity_report();
    CHECK_FALSE(r.identity_preserving);
}

TEST_CASE("isometry") {
    const auto v_id = EntangledOperator(make_chain({{1, 0}, {0, 1}})).build_isometry();
    CMatrix dense = v_id.matrix();
    CHECK(dense(ProductMatrix::flat(0, 0, 2), 0) == Complex(1.0));
    CHECK(dense(ProductMatrix::flat(1, 1, 2), 1) == Complex(1.0));
    CHECK(dense.cwiseAbs().sum() == 2.0);

    dense = EntangledOperator(make_chain({{0.5, 0.5}, {0.5, 0.5}})).build_isometry().matrix();
    CHECK(std::abs(dense(ProductMatrix::flat(0, 0, 2), 0) - 1.0 / std::sqrt(2.0)) <= 1e-15);
    CHECK(std::abs(dense(ProductMatrix::flat(0, 1, 2), 0) - 1.0 / std::sqrt(2.0)) <= 1e-15);
    CHECK(dense(ProductMatrix::flat(1, 0, 2), 0) == Complex(0.0));

    Rng rng(33);
    for (int t = 0; t < 10; ++t) {
        const auto op = random_operator(6, rng, true);
        CHECK(max_abs(op.build_isometry().gram() - CMatrix::Identity(6, 6)) <= 1e-10);
    }
    const auto leaky = EntangledOperator(parse_csv_matrix("0.3,0.3;0.2,0.2")).build_isometry().gram();
    CHECK(std::abs(leaky(0, 0) - 0.6) <= 1e-12);
    CHECK(std::abs(leaky(1, 1) - 0.4) <= 1e-12);
}

TEST_CASE("transition expectation: Schur route equals V* X V") {
    Rng rng(34);
    for (int t = 0; t < 30; ++t) {
        const std::size_t n = 2 + uniform_index(rng, 5);
        const auto op = random_operator(n, rng, t % 3 == 0);
        const CMatrix a = random_complex(n, rng), b = random_complex(n, rng);
        CHECK(max_abs(op.expectation(a, b) - op.expectation(tensor(a, b))) <= 1e-10);
        CHECK(max_abs(op.expectation(CMatrix::Identity(n, n), CMatrix::Identity(n, n)) -
                      CMatrix::Identity(n, n)) <= 1e-12);

        // E(e_ij (x) 1) = P(1)_ij e_ij.
        const auto i = uniform_index(rng, n), j = uniform_index(rng, n);
        CMatrix e = CMatrix::Zero(n, n);
        e(i, j) = 1;
        CHECK(max_abs(op.expectation(e, CMatrix::Identity(n, n)) - op.p_one()(i, j) * e) <= 1e-15);
    }
    const EntangledOperator id(make_chain({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
    const CMatrix a = random_complex(3, rng), b = random_complex(3, rng);
    CHECK(max_abs(id.expectation(a, b) - schur_product(a, b)) == 0.0);
}

TEST_CASE("transition expectation is completely positive") {
    Rng rng(35);
    for (int t = 0; t < 20; ++t) {
        const auto op = random_operator(3, rng, true);
        const CMatrix x = emc::testing::random_density(9, rng);
        CHECK(min_eigenvalue(op.expectation(ProductMatrix(3, x))) >= -1e-10);
    }
}

TEST_CASE("markov operator acts classically on diagonals for every gauge") {
    Rng rng(36);
    for (int t = 0; t < 20; ++t) {
        const std::size_t n = 2 + uniform_index(rng, 5);
        const auto op = random_operator(n, rng, true);
        Eigen::VectorXd d(n);
        for (std::size_t i = 0; i < n; ++i)
            d(i) = uniform(rng, -1, 1);
        const CMatrix x = d.cast<Complex>().asDiagonal();
        const Eigen::VectorXd classical = op.base().entries() * d;
        const CMatrix once = op.markov_operator(x);
        CHECK((once.diagonal() - classical.cast<Complex>()).lpNorm<1>() <= 1e-12);
        CHECK(max_abs(once - CMatrix(once.diagonal().asDiagonal())) == 0.0);
        const Eigen::VectorXd twice = op.base().entries() * classical;
        CHECK((op.markov_operator(once).diagonal() - twice.cast<Complex>()).lpNorm<1>() <= 1e-12);
        CHECK(max_abs(op.markov_operator(CMatrix::Identity(n, n)) - CMatrix::Identity(n, n)) <= 1e-12);
    }
}

TEST_CASE("quantum measure") {
    // Projection chain q_ij = pi_j: Q_ij = sqrt(pi_i pi_j).
    const Eigen::Vector3d pi(0.5, 0.3, 0.2);
    Eigen::MatrixXd proj(3, 3);
    for (int i = 0; i < 3; ++i)
        proj.row(i) = pi.transpose();
    const EntangledOperator op(StochasticMatrix(Alphabet::numbered(3), proj));
    const auto q = op.quantum_measure(Eigen::VectorXd(pi));
    CHECK(q.normalized);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(std::abs(q.q(i, j) - std::sqrt(pi(i) * pi(j))) <= 1e-15);

    // Flip chain, pi = (1/2, 1/2): Q_00 = pi_1 P_10 = 1/2, Q_01 = sum_k pi_k sqrt(P_k0 P_k1) = 0.
    const EntangledOperator flip(make_chain({{0, 1}, {1, 0}}));
    const auto qf = flip.quantum_measure(Eigen::Vector2d(0.5, 0.5));
    CHECK(std::abs(qf.q(0, 0) - 0.5) == 0.0);
    CHECK(qf.q(0, 1) == Complex(0.0));

    CHECK_THROWS_AS(flip.quantum_measure(Eigen::Vector2d(-0.1, 1.1)), ValidationError);
    CHECK_FALSE(flip.quantum_measure(Eigen::Vector2d(2.0, 2.0)).normalized);
}

TEST_CASE("quantum measure properties on invariant distributions") {
    Rng rng(37);
    for (int t = 0; t < 20; ++t) {
        const std::size_t n = 2 + uniform_index(rng, 5);
        const StochasticMatrix p(Alphabet::numbered(n), emc::testing::random_stochastic(n, rng, 0.2, true));
        const auto d = decompose(p);
        std::vector<double> alpha(d.classes.size(), 1.0 / static_cast<double>(d.classes.size()));
        const auto pi = mix_stationary(p, d, alpha);
        const auto chi = PhaseMatrix::random(n, rng());
        const EntangledOperator plain(p), phased(p, chi);
        const auto q = plain.quantum_measure(pi);
        const auto qc = phased.quantum_measure(pi);

        CHECK(max_abs(qc.q - emc::testing::quantum_measure_by_definition(p.entries(), chi.matrix(), pi.weights)) <= 1e-12);
        CHECK(min_eigenvalue(q.q) >= -1e-10);
        CHECK(min_eigenvalue(qc.q) >= -1e-10);
        CHECK(std::abs(q.q.trace() - 1.0) <= 1e-10);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(std::abs(q.q(i, i) - pi.weights(i)) <= 1e-12);
            CHECK(std::abs(qc.q(i, i) - q.q(i, i)) <= 1e-12); // gauge-independent diagonal
            for (std::size_t j = 0; j < n; ++j)
                CHECK(std::abs(qc.q(i, j)) <= std::sqrt(pi.weights(i) * pi.weights(j)) + 1e-12);
        }
    }
}
