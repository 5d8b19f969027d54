#include "emc/errors.hpp"
#include "emc/schur_algebra.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace emc;
using emc::testing::random_complex;
using emc::testing::random_density;

TEST_CASE("schur_product") {
    CMatrix a(2, 2), b(2, 2), expect(2, 2);
    a << 1, 2, 3, 4;
    b << 5, 6, 7, 8;
    expect << 5, 12, 21, 32;
    CHECK(schur_product(a, b) == expect);
    CHECK(schur_product(a, CMatrix::Ones(2, 2)) == a);

    CMatrix e01 = CMatrix::Zero(2, 2), e10 = CMatrix::Zero(2, 2);
    e01(0, 1) = 1;
    e10(1, 0) = 1;
    CHECK(schur_product(e01, e10).isZero(0));
    CHECK_THROWS_AS(schur_product(a, CMatrix::Ones(3, 3)), ValidationError);
}

TEST_CASE("phi_embed places entries on diagonal pairs only") {
    const auto n = 3;
    const auto one = phi_embed(CMatrix::Identity(n, n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t l = 0; l < n; ++l) {
                    const bool diag_pair = i == j && k == l && i == k;
                    CHECK(one(i, j, k, l) == Complex(diag_pair ? 1.0 : 0.0));
                }
    CHECK(schur_contract(one) == CMatrix::Identity(n, n));

    CMatrix e01 = CMatrix::Zero(2, 2);
    e01(0, 1) = 1;
    const auto x = phi_embed(e01);
    CHECK(x.matrix().cwiseAbs().sum() == 1.0);
    CHECK(x(0, 0, 1, 1) == Complex(1.0));
}

TEST_CASE("schur_contract identities") {
    Rng rng(21);
    for (int t = 0; t < 20; ++t) {
        const CMatrix a = random_complex(3, rng), b = random_complex(3, rng);
        CHECK((schur_contract(tensor(a, b)) - schur_product(a, b)).cwiseAbs().maxCoeff() == 0.0);
        const CMatrix c = random_complex(4, rng);
        CHECK(schur_contract(phi_embed(c)) == c); // exact: index bookkeeping only
    }
    CHECK(schur_contract(ProductMatrix(3, CMatrix::Identity(9, 9))) == CMatrix::Identity(3, 3));
}

TEST_CASE("phi is a *-morphism and preserves traces and Schatten norms") {
    Rng rng(22);
    for (int t = 0; t < 30; ++t) {
        const CMatrix a = random_complex(4, rng), b = random_complex(4, rng);
        const auto pa = phi_embed(a), pb = phi_embed(b);
        CHECK((phi_embed(a * b).matrix() - pa.matrix() * pb.matrix()).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((phi_embed(a.adjoint()).matrix() - pa.matrix().adjoint()).cwiseAbs().maxCoeff() <= 1e-12);

        const CMatrix rho = random_density(4, rng) * 3.7;
        CHECK(std::abs(phi_embed(rho).matrix().trace() - rho.trace()) <= 1e-12);
        for (int p : {1, 2})
            CHECK(std::abs(schatten_norm(phi_embed(a).matrix(), p) - schatten_norm(a, p)) <= 1e-10);
    }
}

TEST_CASE("m is positive and contracts the trace on PSD inputs") {
    Rng rng(23);
    for (int t = 0; t < 30; ++t) {
        const CMatrix sigma = random_density(9, rng);
        const auto m = schur_contract(ProductMatrix(3, sigma));
        const double tr = m.trace().real();
        CHECK(tr >= 0.0);
        CHECK(tr <= sigma.trace().real() + 1e-12);
        CHECK(min_eigenvalue(m) >= -1e-10);
    }
}

TEST_CASE("schatten norms and trace-class validation") {
    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = 3;
    d(1, 1) = -4;
    CHECK(schatten_norm(d, 1) == doctest::Approx(7.0));
    CHECK(schatten_norm(d, 2) == doctest::Approx(5.0));
    CHECK_THROWS_AS(schatten_norm(d, 3), ValidationError);
    CHECK_THROWS_AS(schatten_norm(CMatrix::Zero(257, 257), 1), ValidationError);

    Rng rng(24);
    const CMatrix rho = random_density(5, rng);
    const TraceClassMatrix t(rho);
    CHECK(t.trace() == doctest::Approx(1.0));
    CHECK_THROWS_AS(TraceClassMatrix{d}, InvariantViolation);
    CMatrix skew = CMatrix::Zero(2, 2);
    skew(0, 1) = 1;
    CHECK_THROWS_AS(TraceClassMatrix{skew}, InvariantViolation);
}

TEST_CASE("tensor follows the row-major pair convention") {
    CMatrix a(2, 2), b(2, 2);
    a << 1, 2, 3, 4;
    b << 0, 1, 1, 0;
    const auto x = tensor(a, b);
    CHECK(x(1, 0, 0, 1) == a(1, 0) * b(0, 1));
    CHECK(x.matrix()(ProductMatrix::flat(1, 0, 2), ProductMatrix::flat(0, 1, 2)) == Complex(3.0));
}
