#include "emc/selftest.hpp"

#include "emc/errors.hpp"
#include "emc/ergodic_analyzer.hpp"
#include "emc/group_walks.hpp"
#include "emc/random.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <vector>

namespace emc {

namespace {

struct Check {
    std::string name;
    double threshold;
    std::function<double()> residual; // pass iff residual <= threshold
};

double max_abs(const CMatrix &m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

Eigen::MatrixXd random_stochastic(std::size_t n, Rng &rng, double sparsity) {
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            m(i, j) = uniform01(rng) < sparsity ? 0.0 : 0.05 + uniform01(rng);
        if (m.row(i).sum() == 0.0)
            m(i, i) = 1.0;
        m.row(i) /= m.row(i).sum();
    }
    return m;
}

CMatrix random_complex(std::size_t n, Rng &rng) {
    const auto ni = static_cast<Eigen::Index>(n);
    CMatrix a(ni, ni);
    for (Eigen::Index i = 0; i < ni; ++i)
        for (Eigen::Index j = 0; j < ni; ++j)
            a(i, j) = Complex(uniform(rng, -1, 1), uniform(rng, -1, 1));
    return a;
}

CMatrix random_psd(std::size_t n, Rng &rng) {
    const CMatrix a = random_complex(n, rng);
    return a * a.adjoint();
}

struct Sample {
    StochasticMatrix p;
    ChainDecomposition d;
    StationaryDistribution pi;
    EntangledOperator op;
    QuantumMeasure q;
};

Sample make_sample(Eigen::MatrixXd m, const PhaseMatrix &chi, const Tolerances &tol) {
    const auto n = static_cast<std::size_t>(m.rows());
    StochasticMatrix p(Alphabet::numbered(n), std::move(m), tol);
    auto d = decompose(p, tol);
    std::vector<double> alpha(d.classes.size(), 1.0 / static_cast<double>(d.classes.size()));
    auto pi = mix_stationary(p, d, alpha, tol);
    EntangledOperator op(p, chi, tol);
    auto q = op.quantum_measure(pi);
    return {std::move(p), std::move(d), std::move(pi), std::move(op), std::move(q)};
}

std::vector<Sample> chain_samples(std::uint64_t seed, const Tolerances &tol) {
    Rng rng(seed ^ 0x5eedull);
    std::vector<Sample> out;
    for (std::size_t t = 0; t < 6; ++t) {
        const std::size_t n = 2 + t % 4;
        const auto m = random_stochastic(n, rng, t < 3 ? 0.0 : 0.4);
        out.push_back(make_sample(m, t % 2 ? PhaseMatrix::random(n, rng()) : PhaseMatrix::ones(n), tol));
    }
    Eigen::MatrixXd flip(2, 2);
    flip << 0, 1, 1, 0;
    out.push_back(make_sample(flip, PhaseMatrix::ones(2), tol));
    Eigen::MatrixXd absorbing(3, 3);
    absorbing << 0.2, 0.5, 0.3, 0, 1, 0, 0, 0, 1;
    out.push_back(make_sample(absorbing, PhaseMatrix::random(3, seed + 1), tol));
    return out;
}

std::vector<Check> build_checks(const SelftestOptions &o) {
    const auto &tol = o.tol;
    const auto seed = o.seed;
    auto samples = std::make_shared<std::vector<Sample>>(chain_samples(seed, tol));
    std::vector<Check> c;

    // classical_chain
    c.push_back({"stationary fixed point", tol.solver_tol, [samples] {
                     double worst = 0.0;
                     for (const auto &s : *samples)
                         for (const auto &cls : s.d.classes)
                             worst = std::max(worst, fixed_point_residual(s.p, cls.stationary));
                     return worst;
                 }});
    c.push_back({"stationary normalization", tol.trace_tol, [samples] {
                     double worst = 0.0;
                     for (const auto &s : *samples)
                         worst = std::max(worst, std::abs(s.pi.weights.sum() - 1.0));
                     return worst;
                 }});
    c.push_back({"cyclic subclass order", 0.0, [samples, tol] {
                     double bad = 0.0;
                     for (const auto &s : *samples)
                         for (const auto &cls : s.d.classes) {
                             std::vector<std::size_t> level(s.p.size(), 0);
                             for (std::size_t r = 0; r < cls.subclasses.size(); ++r)
                                 for (auto i : cls.subclasses[r])
                                     level[i] = r;
                             for (auto i : cls.states)
                                 for (auto j : cls.states)
                                     if (s.p(i, j) > tol.support_tol && level[j] != (level[i] + 1) % cls.period)
                                         bad += 1.0;
                         }
                     return bad;
                 }});

    // schur_algebra
    c.push_back({"schur left inverse", 0.0, [seed] {
                     Rng rng(seed + 11);
                     double worst = 0.0;
                     for (int t = 0; t < 20; ++t) {
                         const CMatrix a = random_complex(4, rng);
                         worst = std::max(worst, max_abs(schur_contract(phi_embed(a)) - a));
                     }
                     return worst;
                 }});
    c.push_back({"schur morphism", 1e-12, [seed] {
                     Rng rng(seed + 12);
                     double worst = 0.0;
                     for (int t = 0; t < 20; ++t) {
                         const CMatrix a = random_complex(4, rng), b = random_complex(4, rng);
                         worst = std::max(worst, max_abs(phi_embed(a * b).matrix() -
                                                         phi_embed(a).matrix() * phi_embed(b).matrix()));
                         worst = std::max(worst, max_abs(phi_embed(a.adjoint()).matrix() -
                                                         phi_embed(a).matrix().adjoint()));
                     }
                     return worst;
                 }});
    c.push_back({"schur trace and norm preservation", 1e-10, [seed] {
                     Rng rng(seed + 13);
                     double worst = 0.0;
                     for (int t = 0; t < 10; ++t) {
                         const CMatrix rho = random_psd(4, rng);
                         const CMatrix big = phi_embed(rho).matrix();
                         worst = std::max(worst, std::abs(big.trace() - rho.trace()));
                         for (int p : {1, 2})
                             worst = std::max(worst, std::abs(schatten_norm(big, p) - schatten_norm(rho, p)));
                     }
                     return worst;
                 }});
    c.push_back({"schur contraction positivity", tol.psd_tol, [seed] {
                     Rng rng(seed + 14);
                     double worst = 0.0;
                     for (int t = 0; t < 10; ++t) {
                         const CMatrix sigma = random_psd(9, rng);
                         const CMatrix m = schur_contract(ProductMatrix(3, sigma));
                         worst = std::max(worst, -min_eigenvalue(m));
                         worst = std::max(worst, m.trace().real() - sigma.trace().real());
                     }
                     return worst;
                 }});

    // entangled_core
    c.push_back({"phase modulus", 1e-12, [seed, corrupt = o.corrupt_phase] {
                     auto chi = PhaseMatrix::random(4, seed + 21);
                     if (!corrupt)
                         return chi.modulus_defect();
                     CMatrix bad = chi.matrix();
                     bad(1, 2) *= 1.1;
                     return PhaseMatrix::unchecked(bad).modulus_defect();
                 }});
    c.push_back({"sqrt cache", 1e-14, [samples] {
                     double worst = 0.0;
                     for (const auto &s : *samples)
                         worst = std::max(worst, s.op.sqrt_cache_defect());
                     return worst;
                 }});
    c.push_back({"pure generation", tol.iso_tol, [samples, seed] {
                     Rng rng(seed + 22);
                     double worst = 0.0;
                     for (const auto &s : *samples) {
                         const auto n = s.p.size();
                         const CMatrix a = random_complex(n, rng), b = random_complex(n, rng);
                         worst = std::max(worst, max_abs(s.op.expectation(a, b) - s.op.expectation(tensor(a, b))));
                     }
                     return worst;
                 }});
    c.push_back({"isometry", tol.iso_tol, [samples] {
                     double worst = 0.0;
                     for (const auto &s : *samples) {
                         const auto n = static_cast<Eigen::Index>(s.p.size());
                         worst = std::max(worst, max_abs(s.op.build_isometry().gram() - CMatrix::Identity(n, n)));
                     }
                     return worst;
                 }});
    c.push_back({"markov operator", 1e-12, [samples] {
                     double worst = 0.0;
                     for (const auto &s : *samples) {
                         const Eigen::VectorXd d = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(s.p.size()), -1, 1);
                         const CMatrix e1 = s.op.markov_operator(d.cast<Complex>().asDiagonal());
                         const Eigen::VectorXd classical = s.p.entries() * d;
                         worst = std::max(worst, max_abs(CMatrix(e1) - CMatrix(classical.cast<Complex>().asDiagonal())));
                     }
                     return worst;
                 }});
    c.push_back({"quantum measure", tol.psd_tol, [samples] {
                     double worst = 0.0;
                     for (const auto &s : *samples) {
                         worst = std::max(worst, -min_eigenvalue(s.q.q));
                         worst = std::max(worst, std::abs(s.q.q.trace().real() - 1.0));
                         for (std::size_t i = 0; i < s.p.size(); ++i) {
                             const auto ii = static_cast<Eigen::Index>(i);
                             worst = std::max(worst, std::abs(s.q.q(ii, ii) - s.pi.weights(ii)));
                             for (std::size_t j = 0; j < s.p.size(); ++j) {
                                 const auto jj = static_cast<Eigen::Index>(j);
                                 worst = std::max(worst, std::abs(s.q.q(ii, jj)) -
                                                             std::sqrt(s.pi.weights(ii) * s.pi.weights(jj)));
                             }
                         }
                     }
                     return worst;
                 }});

    // chain_correlator
    c.push_back({"route equivalence", 1e-10, [samples, corrupt = o.corrupt_sqrt_cache] {
                     double worst = 0.0;
                     for (std::size_t t = 0; t < samples->size(); ++t) {
                         const auto &s = (*samples)[t];
                         EntangledOperator op = s.op;
                         if (corrupt && t == 0) {
                             Eigen::MatrixXd cache = op.sqrt_cache();
                             cache(0, 0) += 0.05;
                             op = EntangledOperator::with_corrupted_cache(op, cache);
                         }
                         const std::size_t kmax = s.p.size() <= 3 ? 3 : 2;
                         for (std::size_t k = 1; k <= kmax; ++k)
                             worst = std::max(worst, max_abs(density_block_recursive(op, s.q, k).matrix -
                                                             density_block_closed(op, s.q, k).matrix));
                     }
                     return worst;
                 }});
    c.push_back({"marginal consistency", 1e-10, [samples] {
                     double worst = 0.0;
                     for (const auto &s : *samples) {
                         const auto d1 = density_block_closed(s.op, s.q, 1);
                         const auto d2 = density_block_closed(s.op, s.q, 2);
                         worst = std::max(worst, max_abs(partial_trace_site(d2, Side::left).matrix - d1.matrix));
                         worst = std::max(worst, max_abs(partial_trace_site(d2, Side::right).matrix - d1.matrix));
                     }
                     return worst;
                 }});
    c.push_back({"diagonal restriction", 1e-10, [samples] {
                     double worst = 0.0;
                     for (const auto &s : *samples) {
                         const auto n = s.p.size();
                         const std::size_t k = 3;
                         std::size_t total = 1;
                         for (std::size_t m = 0; m < k; ++m)
                             total *= n;
                         for (std::size_t f = 0; f < total; ++f) {
                             const auto path = decode_tuple(f, n, k);
                             ObservableWord w;
                             double classical = s.pi.weights(static_cast<Eigen::Index>(path[0]));
                             for (std::size_t m = 0; m < k; ++m) {
                                 w.push_back(matrix_unit(n, path[m], path[m]));
                                 if (m + 1 < k)
                                     classical *= s.p(path[m], path[m + 1]);
                             }
                             worst = std::max(worst, std::abs(finite_correlation(s.op, s.q, w) - classical));
                         }
                     }
                     return worst;
                 }});
    c.push_back({"state axioms", 1e-10, [samples] {
                     double worst = 0.0;
                     for (const auto &s : *samples) {
                         const auto b = density_block_closed(s.op, s.q, 2);
                         worst = std::max(worst, hermitian_defect(b.matrix));
                         worst = std::max(worst, -min_eigenvalue(b.matrix));
                         worst = std::max(worst, std::abs(b.trace - 1.0));
                     }
                     return worst;
                 }});
    c.push_back({"gauge covariance", 1e-12, [samples, tol] {
                     double worst = 0.0;
                     for (const auto &s : *samples) {
                         const EntangledOperator plain(s.p, tol);
                         const auto a = density_block_closed(plain, plain.quantum_measure(s.pi), 2);
                         const auto b = density_block_closed(s.op, s.q, 2);
                         worst = std::max(worst, max_abs(CMatrix(a.matrix.diagonal()) - CMatrix(b.matrix.diagonal())));
                     }
                     return worst;
                 }});

    // ergodic_analyzer
    c.push_back({"mixture exactness", 1e-10, [samples, seed] {
                     double worst = 0.0;
                     for (const auto &s : *samples)
                         worst = std::max(worst, decomposition_check(s.op, s.q, s.d, s.pi,
                                                                     standard_test_words(s.p.size(), seed)));
                     return worst;
                 }});
    c.push_back({"phi averaging", 1e-10, [samples, seed] {
                     double worst = 0.0;
                     for (const auto &s : *samples)
                         worst = std::max(worst, phi_average_check(s.op, s.q, s.d, s.pi,
                                                                   standard_test_words(s.p.size(), seed)));
                     return worst;
                 }});
    c.push_back({"verdict monotonicity", 0.0, [samples, tol] {
                     double bad = 0.0;
                     for (const auto &s : *samples) {
                         const auto v = verdict(s.d, s.pi, {}, tol);
                         if (v.strongly_clustering && !v.ergodic)
                             bad += 1.0;
                     }
                     return bad;
                 }});

    // group_walks
    c.push_back({"group axioms", 0.0, [seed] {
                     double bad = 0.0;
                     for (const auto &g : {GroupSpec::cyclic(6), GroupSpec::dihedral(3), GroupSpec::dihedral(4)})
                         bad += static_cast<double>(group_axiom_failures(g, seed, 50));
                     return bad;
                 }});
    c.push_back({"double stochastic walks", 1e-10, [seed] {
                     double worst = 0.0;
                     for (const auto &g : {GroupSpec::cyclic(3), GroupSpec::cyclic(6), GroupSpec::dihedral(3),
                                           GroupSpec::dihedral(4)})
                         for (auto side : {WalkSide::right, WalkSide::left}) {
                             const auto p = walk_matrix(g, GroupMeasure::seeded(g, seed + 31), side);
                             const Eigen::MatrixXd &m = p.entries();
                             worst = std::max(worst, (m.rowwise().sum().array() - 1.0).abs().maxCoeff());
                             worst = std::max(worst, (m.colwise().sum().array() - 1.0).abs().maxCoeff());
                         }
                     return worst;
                 }});
    c.push_back({"walk equivariance", 1e-10, [seed] {
                     double worst = 0.0;
                     Rng rng(seed + 32);
                     for (const auto &g : {GroupSpec::cyclic(3), GroupSpec::dihedral(3)}) {
                         std::vector<CMatrix> samples;
                         for (int t = 0; t < 5; ++t)
                             samples.push_back(random_complex(g.size(), rng));
                         const auto mu = GroupMeasure::seeded(g, seed + 33);
                         for (std::size_t e = 0; e < g.size(); ++e)
                             for (auto side : {WalkSide::right, WalkSide::left})
                                 worst = std::max(worst, equivariance_residual(g, mu, side, e, samples));
                     }
                     return worst;
                 }});
    return c;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

} // namespace

SelftestResult run_selftest(const SelftestOptions &options, std::ostream &out) {
    SelftestResult r;
    for (const auto &check : build_checks(options)) {
        ++r.checks;
        double residual = 0.0;
        std::string error;
        try {
            residual = check.residual();
        } catch (const std::exception &e) {
            error = e.what();
        }
        const bool ok = error.empty() && std::isfinite(residual) && residual <= check.threshold;
        out << (ok ? "PASS " : "FAIL ") << check.name << " residual=" << (error.empty() ? fmt(residual) : "n/a")
            << " tol=" << fmt(check.threshold);
        if (!error.empty())
            out << " error=" << error;
        out << '\n';
        if (!ok) {
            r.passed = false;
            r.failed_invariant = check.name;
            r.residual = residual;
            r.threshold = check.threshold;
            break;
        }
    }
    return r;
}

} // namespace emc
