#include "emc/chain_correlator.hpp"
#include "emc/errors.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace emc;
using emc::testing::make_chain;
using emc::testing::path_probability;

namespace {

double max_abs(const CMatrix &m) { return m.cwiseAbs().maxCoeff(); }

CMatrix kron(const CMatrix &a, const CMatrix &b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

struct Setup {
    StochasticMatrix p;
    StationaryDistribution pi;
    EntangledOperator op;
    QuantumMeasure q;
};

Setup setup(const StochasticMatrix &p, const PhaseMatrix &chi) {
    const auto d = decompose(p);
    std::vector<double> alpha(d.classes.size(), 1.0 / static_cast<double>(d.classes.size()));
    auto pi = mix_stationary(p, d, alpha);
    EntangledOperator op(p, chi);
    auto q = op.quantum_measure(pi);
    return {p, pi, op, q};
}

Setup symmetric_two_state() { return setup(make_chain({{0.7, 0.3}, {0.3, 0.7}}), PhaseMatrix::ones(2)); }

Setup projection_chain(const Eigen::VectorXd &pi) {
    Eigen::MatrixXd m(pi.size(), pi.size());
    for (Eigen::Index i = 0; i < pi.size(); ++i)
        m.row(i) = pi.transpose();
    return setup(StochasticMatrix(Alphabet::numbered(static_cast<std::size_t>(pi.size())), m),
                 PhaseMatrix::ones(static_cast<std::size_t>(pi.size())));
}

Setup random_setup(std::size_t n, Rng &rng, bool phased) {
    const StochasticMatrix p(Alphabet::numbered(n), emc::testing::random_stochastic(n, rng, 0.3));
    return setup(p, phased ? PhaseMatrix::random(n, rng()) : PhaseMatrix::ones(n));
}

} // namespace

TEST_CASE("finite correlation examples") {
    const auto s = symmetric_two_state();
    const CMatrix e00 = matrix_unit(2, 0, 0);
    CHECK(std::abs(finite_correlation(s.op, s.q, {CMatrix::Identity(2, 2)}) - 1.0) <= 1e-12);
    CHECK(std::abs(finite_correlation(s.op, s.q, {e00}) - 0.5) <= 1e-12);
    CHECK(std::abs(finite_correlation(s.op, s.q, {e00, e00}) - 0.35) <= 1e-12);
    CHECK_THROWS_AS(finite_correlation(s.op, s.q, {}), ValidationError);
    CHECK_THROWS_AS(finite_correlation(s.op, s.q, {CMatrix::Identity(3, 3)}), ValidationError);
}

TEST_CASE("diagonal restriction reproduces classical path probabilities") {
    Rng rng(41);
    for (int t = 0; t < 8; ++t) {
        const std::size_t n = 2 + uniform_index(rng, 3);
        const auto s = random_setup(n, rng, t % 2 == 1);
        for (std::size_t k = 1; k <= 3; ++k) {
            const std::size_t total = static_cast<std::size_t>(std::pow(n, k));
            for (std::size_t f = 0; f < total; ++f) {
                const auto path = decode_tuple(f, n, k);
                ObservableWord w;
                for (auto i : path)
                    w.push_back(matrix_unit(n, i, i));
                CHECK(std::abs(finite_correlation(s.op, s.q, w) -
                               path_probability(s.p.entries(), s.pi.weights, path)) <= 1e-10);
            }
        }
    }
}

TEST_CASE("finite correlation is linear in each site") {
    Rng rng(42);
    const auto s = random_setup(3, rng, true);
    for (int t = 0; t < 10; ++t) {
        ObservableWord w{emc::testing::random_complex(3, rng), emc::testing::random_complex(3, rng),
                         emc::testing::random_complex(3, rng)};
        const CMatrix b = emc::testing::random_complex(3, rng);
        const Complex c(uniform(rng, -1, 1), uniform(rng, -1, 1));
        const std::size_t site = uniform_index(rng, 3);
        ObservableWord w2 = w, mixed = w;
        w2[site] = b;
        mixed[site] = w[site] + c * b;
        const Complex lhs = finite_correlation(s.op, s.q, mixed);
        const Complex rhs = finite_correlation(s.op, s.q, w) + c * finite_correlation(s.op, s.q, w2);
        CHECK(std::abs(lhs - rhs) <= 1e-12);
    }
}

TEST_CASE("density block of the symmetric two-state chain") {
    const auto s = symmetric_two_state();
    CMatrix expect(2, 2);
    expect << 0.5, 0.42, 0.42, 0.5;
    const auto rec = density_block_recursive(s.op, s.q, 1);
    const auto closed = density_block_closed(s.op, s.q, 1);
    CHECK(max_abs(rec.matrix - expect) <= 1e-12);
    CHECK(max_abs(closed.matrix - expect) <= 1e-12);
    CHECK(max_abs(closed.matrix - schur_product(s.q.q, s.op.p_one())) <= 1e-12);
    CHECK(rec.trace == doctest::Approx(1.0));

    const auto diag = spectral_diagnostics(rec);
    REQUIRE(diag.eigenvalues.size() == 2);
    CHECK(diag.eigenvalues[0] == doctest::Approx(0.92).epsilon(1e-12));
    CHECK(diag.eigenvalues[1] == doctest::Approx(0.08).epsilon(1e-12));
    CHECK(diag.rank == 2);
}

TEST_CASE("projection chain gives a product pure state") {
    const Eigen::Vector3d pi(0.5, 0.3, 0.2);
    const auto s = projection_chain(pi);
    const auto d1 = density_block_recursive(s.op, s.q, 1);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(std::abs(d1.matrix(i, j) - std::sqrt(pi(i) * pi(j))) <= 1e-12);
    const auto d2 = density_block_recursive(s.op, s.q, 2);
    CHECK(max_abs(d2.matrix - kron(d1.matrix, d1.matrix)) <= 1e-10);
    const auto d3 = density_block_closed(s.op, s.q, 3);
    const CMatrix prod = kron(kron(d1.matrix, d1.matrix), d1.matrix);
    CHECK(max_abs(d3.matrix - prod) <= 1e-10);
    const auto diag = spectral_diagnostics(d3);
    CHECK(diag.rank == 1);
    CHECK(std::abs(diag.entropy) <= 1e-10);
}

TEST_CASE("recursive and closed routes agree, with and without phases") {
    Rng rng(43);
    for (int t = 0; t < 12; ++t) {
        const std::size_t n = 2 + uniform_index(rng, 4);
        const auto s = random_setup(n, rng, t % 2 == 0);
        const std::size_t kmax = n <= 3 ? 4 : 3;
        for (std::size_t k = 1; k <= kmax; ++k) {
            const auto rec = density_block_recursive(s.op, s.q, k);
            const auto closed = density_block_closed(s.op, s.q, k);
            CHECK(max_abs(rec.matrix - closed.matrix) <= 1e-10);
            CHECK(std::abs(rec.trace - 1.0) <= 1e-10);
            CHECK(hermitian_defect(rec.matrix) <= 1e-10);
            CHECK(min_eigenvalue(rec.matrix) >= -1e-10);
        }
    }
}

TEST_CASE("density block diagonals are classical and gauge independent") {
    Rng rng(44);
    const StochasticMatrix p(Alphabet::numbered(3), emc::testing::random_stochastic(3, rng));
    const auto plain = setup(p, PhaseMatrix::ones(3));
    const auto phased = setup(p, PhaseMatrix::random(3, 99));
    const auto a = density_block_closed(plain.op, plain.q, 3);
    const auto b = density_block_closed(phased.op, phased.q, 3);
    for (std::size_t f = 0; f < a.dim(); ++f) {
        const auto path = decode_tuple(f, 3, 3);
        CHECK(std::abs(a.matrix(f, f) - path_probability(p.entries(), plain.pi.weights, path)) <= 1e-12);
        CHECK(std::abs(a.matrix(f, f) - b.matrix(f, f)) <= 1e-12);
    }
    CHECK(max_abs(a.matrix - b.matrix) > 1e-3); // phases do reach off-diagonal entries
}

TEST_CASE("partial traces reproduce the shorter block") {
    Rng rng(45);
    for (int t = 0; t < 6; ++t) {
        const std::size_t n = 2 + uniform_index(rng, 3);
        const auto s = random_setup(n, rng, t % 2 == 1);
        for (std::size_t k = 1; k <= 2; ++k) {
            const auto shorter = density_block_recursive(s.op, s.q, k);
            const auto longer = density_block_closed(s.op, s.q, k + 1);
            CHECK(max_abs(partial_trace_site(longer, Side::right).matrix - shorter.matrix) <= 1e-10);
            CHECK(max_abs(partial_trace_site(longer, Side::left).matrix - shorter.matrix) <= 1e-10);
        }
    }
    const auto s = symmetric_two_state();
    CHECK_THROWS_AS(partial_trace_site(density_block_closed(s.op, s.q, 1), Side::left), ValidationError);
}

TEST_CASE("block size limits") {
    const auto s = symmetric_two_state();
    CHECK_THROWS_AS(density_block_recursive(s.op, s.q, 0), ValidationError);
    CHECK_THROWS_AS(density_block_closed(s.op, s.q, 13), ValidationError); // 2^13 > 4096
    CHECK_NOTHROW(density_block_closed(s.op, s.q, 12));
}

TEST_CASE("shift correlation against the classical two-state oracle") {
    const auto s = symmetric_two_state();
    const CMatrix e00 = matrix_unit(2, 0, 0), one = CMatrix::Identity(2, 2);
    CHECK(std::abs(shift_correlation(s.op, s.q, e00, e00, 0) - 0.35) <= 1e-12);
    Eigen::MatrixXd power = s.p.entries();
    for (std::size_t gap = 0; gap < 30; ++gap) {
        CHECK(std::abs(shift_correlation(s.op, s.q, one, one, gap) - 1.0) <= 1e-12);
        const Complex v = shift_correlation(s.op, s.q, e00, e00, gap);
        CHECK(std::abs(v - 0.5 * power(0, 0)) <= 1e-12);
        // Covariance decays like (1 - a - b)^(gap+1) = 0.4^(gap+1).
        CHECK(std::abs(v.real() - 0.25 - 0.25 * std::pow(0.4, gap + 1)) <= 1e-12);
        power = power * s.p.entries();
    }
}

TEST_CASE("shift correlation fast path equals the padded word") {
    Rng rng(46);
    const auto s = random_setup(4, rng, true);
    const CMatrix a = emc::testing::random_complex(4, rng), b = emc::testing::random_complex(4, rng);
    const auto curve = shift_correlation_curve(s.op, s.q, a, b, 6);
    for (std::size_t gap = 0; gap < 6; ++gap) {
        ObservableWord w{a};
        for (std::size_t g = 0; g < gap; ++g)
            w.push_back(CMatrix::Identity(4, 4));
        w.push_back(b);
        const Complex direct = finite_correlation(s.op, s.q, w);
        CHECK(std::abs(shift_correlation(s.op, s.q, a, b, gap) - direct) <= 1e-12);
        CHECK(std::abs(curve[gap] - direct) <= 1e-12);
    }
}

TEST_CASE("spectral diagnostics") {
    DensityBlock b;
    b.k = 1;
    b.alphabet = Alphabet::numbered(2);
    b.matrix = CMatrix::Identity(2, 2) * 0.5;
    b.trace = 1.0;
    const auto d = spectral_diagnostics(b);
    CHECK(d.entropy == doctest::Approx(std::log(2.0)));
    CHECK(d.rank == 2);
    b.matrix(1, 1) = 0.0;
    b.matrix(0, 0) = 1.0;
    const auto pure = spectral_diagnostics(b);
    CHECK(pure.rank == 1);
    CHECK(pure.entropy == 0.0);
}

TEST_CASE("tuple decoding is row-major") {
    CHECK(decode_tuple(0, 3, 2) == std::vector<std::size_t>{0, 0});
    CHECK(decode_tuple(1, 3, 2) == std::vector<std::size_t>{0, 1});
    CHECK(decode_tuple(5, 3, 2) == std::vector<std::size_t>{1, 2});
    CHECK(decode_tuple(26, 3, 3) == std::vector<std::size_t>{2, 2, 2});
}

TEST_CASE("deficient chains report the leaked trace") {
    const auto p = parse_csv_matrix("0.3,0.3;0.2,0.2");
    const EntangledOperator op(p);
    const auto q = op.quantum_measure(Eigen::Vector2d(0.5, 0.5));
    const auto d2 = density_block_closed(op, q, 2);
    // diag Q = pi P, then two more sub-stochastic steps: Tr D^(2) = pi P^3 1.
    const Eigen::MatrixXd m = p.entries();
    const double leaked = Eigen::RowVector2d(0.5, 0.5) * m * m * m * Eigen::Vector2d::Ones();
    CHECK(std::abs(d2.trace - leaked) <= 1e-12);
    CHECK(max_abs(density_block_recursive(op, q, 2).matrix - d2.matrix) <= 1e-12);
}
