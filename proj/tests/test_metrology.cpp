#include "doctest.h"

#include "gaussmet/errors.hpp"
#include "gaussmet/metrology.hpp"
#include "gaussmet/randomized.hpp"

#include <cmath>

using namespace gaussmet;

namespace {

const cplx I(0.0, 1.0);

Generator diag_gen(std::initializer_list<double> g)
{
    RealVector v(static_cast<Eigen::Index>(g.size()));
    Eigen::Index k = 0;
    for (double x : g) v(k++) = x;
    return from_matrix(v.cast<cplx>().asDiagonal());
}

DisentangledForm eigen_squeezed(std::initializer_list<double> s2)
{
    const Eigen::Index m = static_cast<Eigen::Index>(s2.size());
    DisentangledForm d;
    d.V = ComplexMatrix::Identity(m, m);
    d.alpha = ComplexVector::Zero(m);
    d.r = RealVector::Zero(m);
    Eigen::Index k = 0;
    for (double x : s2) d.r(k++) = std::asinh(std::sqrt(x));
    return d;
}

// Test-side oracle: QFI as 4 Var(G) from second moments, written
// independently of the four-term formula.
double variance_oracle(const DisentangledForm& d, const ComplexMatrix& G)
{
    // Moments in the c-basis: <c_k> = alpha_k, <c_k^† c_l>_conn = s_k^2 delta,
    // <c_k c_l>_conn = c_k s_k delta. G~ = V^† G V.
    const ComplexMatrix Gt = d.V.adjoint() * G * d.V;
    const Eigen::Index m = Gt.rows();
    RealVector c(m), s(m);
    for (Eigen::Index k = 0; k < m; ++k) {
        c(k) = std::cosh(d.r(k));
        s(k) = std::sinh(d.r(k));
    }
    // Var(sum G_kl c_k^† c_l) for a product Gaussian state, via Wick's theorem.
    cplx v = 0.0;
    for (Eigen::Index k = 0; k < m; ++k)
        for (Eigen::Index l = 0; l < m; ++l) {
            // <c_k^† c_l> and <c_k c_l> connected parts.
            const double nkl = (k == l) ? s(k) * s(k) : 0.0;
            const double mkl = (k == l) ? c(k) * s(k) : 0.0;
            for (Eigen::Index p = 0; p < m; ++p)
                for (Eigen::Index q = 0; q < m; ++q) {
                    const cplx g1 = Gt(k, l), g2 = Gt(p, q);
                    const double nkq = (k == q) ? s(k) * s(k) : 0.0;
                    const double npl = (p == l) ? s(p) * s(p) : 0.0;
                    const double dlp = (l == p) ? 1.0 : 0.0;
                    const double mkp = (k == p) ? c(k) * s(k) : 0.0;
                    const double mlq = (l == q) ? c(l) * s(l) : 0.0;
                    (void)nkl;
                    (void)mkl;
                    // Connected four-point terms.
                    cplx t = g1 * g2 * (nkq * (npl + dlp) + mkp * mlq);
                    // Displacement terms (one contraction, two mean fields).
                    t += g1 * g2 *
                         (std::conj(d.alpha(k)) * d.alpha(q) * (npl + dlp) +
                          nkq * std::conj(d.alpha(p)) * d.alpha(l) + std::conj(d.alpha(k)) * std::conj(d.alpha(p)) * mlq +
                          mkp * d.alpha(l) * d.alpha(q));
                    v += t;
                }
        }
    return 4.0 * v.real();
}

}  // namespace

TEST_CASE("resources of simple probes")
{
    const Generator g = diag_gen({1.0, 3.0});
    DisentangledForm vac = eigen_squeezed({0.0, 0.0});
    ResourceTriple r = resources(vac, g);
    CHECK(r.n_signal == 0.0);
    CHECK_FALSE(r.defined);
    CHECK(r.g_mean == 0.0);

    r = resources(eigen_squeezed({1.0, 1.0}), g);
    CHECK(r.defined);
    CHECK(r.n_signal == doctest::Approx(2.0));
    CHECK(r.g_mean == doctest::Approx(2.0));
    CHECK(r.g_var == doctest::Approx(1.0));

    DisentangledForm coh = vac;
    coh.alpha << 1.0, 1.0;
    r = resources(coh, g);
    CHECK(r.n_signal == doctest::Approx(2.0));
    CHECK(r.g_mean == doctest::Approx(2.0));
    CHECK(r.g_var == doctest::Approx(1.0));

    CHECK_THROWS_AS(resources(eigen_squeezed({1.0}), g), Error);
}

TEST_CASE("qfi frozen fixtures")
{
    const Generator g = diag_gen({1.0, 3.0});
    DisentangledForm coh = eigen_squeezed({0.0, 0.0});
    coh.alpha << 1.0, 1.0;
    QfiReport rep = qfi(coh, g);
    CHECK(rep.qfi == doctest::Approx(40.0).epsilon(1e-12));
    CHECK(coherent_qfi(rep.resources) == doctest::Approx(40.0).epsilon(1e-12));

    rep = qfi(eigen_squeezed({1.0, 1.0}), g);
    CHECK(rep.qfi == doctest::Approx(160.0).epsilon(1e-12));
    CHECK(rep.bound == doctest::Approx(224.0).epsilon(1e-12));
    CHECK(rep.bound_satisfied);
    CHECK(4.0 * (rep.term_squeeze_a + rep.term_squeeze_b + rep.term_disp + rep.term_cross) ==
          doctest::Approx(rep.qfi).epsilon(1e-12));

    CHECK(qfi(eigen_squeezed({0.0, 0.0}), g).qfi == 0.0);
}

TEST_CASE("bound formula values")
{
    CHECK(qfi_upper_bound({2.0, 2.0, 1.0, true}) == doctest::Approx(224.0));
    CHECK(qfi_upper_bound({2.0, 0.0, 1.0, true}) == doctest::Approx(32.0));
    CHECK(qfi_upper_bound({0.0, 5.0, 3.0, false}) == 0.0);
}

TEST_CASE("qfi agrees with a Wick-theorem variance oracle")
{
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        randomized::Rng rng(seed);
        const Eigen::Index m = 1 + static_cast<Eigen::Index>(seed % 4);
        const DisentangledForm d = randomized::state(m, rng, 1.5, 1.5);
        const Generator g = from_matrix(randomized::hermitian(m, rng));
        const double q = qfi(d, g).qfi;
        REQUIRE(q == doctest::Approx(variance_oracle(d, g.G)).epsilon(1e-9));
    }
}

TEST_CASE("bound holds on random states")
{
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        randomized::Rng rng(seed);
        const Eigen::Index m = 1 + static_cast<Eigen::Index>(seed % 8);
        const DisentangledForm d = randomized::state(m, rng, 4.0, 4.0);
        const Generator g = from_matrix(randomized::hermitian(m, rng, 2.0));
        const QfiReport rep = qfi(d, g);
        REQUIRE(rep.qfi >= -1e-9);
        REQUIRE(rep.qfi <= rep.bound + 1e-9 * std::max(1.0, rep.bound));
        REQUIRE(rep.bound_satisfied);
        REQUIRE(rep.qfi <= qfi_upper_bound_displaced(d, g) + 1e-9 * std::max(1.0, rep.bound));
    }
}

TEST_CASE("coherent path equals the closed form")
{
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        randomized::Rng rng(seed);
        const Eigen::Index m = 1 + static_cast<Eigen::Index>(seed % 6);
        DisentangledForm d = randomized::state(m, rng, 0.0, 3.0);
        d.r.setZero();
        const Generator g = from_matrix(randomized::hermitian(m, rng));
        const QfiReport rep = qfi(d, g);
        REQUIRE(rep.qfi == doctest::Approx(coherent_qfi(rep.resources)).epsilon(1e-10));
    }
}

TEST_CASE("basis invariance")
{
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        randomized::Rng rng(seed + 77);
        const Eigen::Index m = 1 + static_cast<Eigen::Index>(seed % 6);
        const DisentangledForm d = randomized::state(m, rng, 2.0, 2.0);
        const Generator g = from_matrix(randomized::hermitian(m, rng));
        const ComplexMatrix W = randomized::unitary(m, rng);
        DisentangledForm d2 = d;
        d2.V = W * d.V;
        const Generator g2 = from_matrix(W * g.G * W.adjoint());
        const QfiReport a = qfi(d, g), b = qfi(d2, g2);
        REQUIRE(b.qfi == doctest::Approx(a.qfi).epsilon(1e-9));
        REQUIRE(b.resources.n_signal == doctest::Approx(a.resources.n_signal).epsilon(1e-9));
        REQUIRE(b.resources.g_mean == doctest::Approx(a.resources.g_mean).epsilon(1e-9).scale(1.0));
        REQUIRE(b.resources.g_var == doctest::Approx(a.resources.g_var).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("qfi does not depend on the evolved parameter")
{
    randomized::Rng rng(5);
    const DisentangledForm d = randomized::state(4, rng, 1.0, 1.0);
    const Generator g = from_matrix(randomized::hermitian(4, rng));
    DisentangledForm d2 = d;
    d2.V = unitary_exp(g.G, 0.37) * d.V;
    CHECK(qfi(d2, g).qfi == doctest::Approx(qfi(d, g).qfi).epsilon(1e-10));
}

TEST_CASE("lemma2 gap")
{
    ComplexMatrix H = ComplexMatrix::Zero(2, 2);
    H(0, 0) = 1.0;
    H(1, 1) = -1.0;
    CHECK(std::abs(lemma2_gap(H, ComplexMatrix::Identity(2, 2))) < 1e-14);

    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        randomized::Rng rng(seed);
        const Eigen::Index m = 1 + static_cast<Eigen::Index>(seed % 10);
        const ComplexMatrix Hr = randomized::hermitian(m, rng);
        const ComplexMatrix Q = randomized::psd(m, rng);
        REQUIRE(lemma2_gap(Hr, Q) >= -1e-9);
        REQUIRE(lemma2_gap(ComplexMatrix::Identity(m, m), Q) >= -1e-9);
    }

    ComplexMatrix notpsd = ComplexMatrix::Identity(2, 2);
    notpsd(1, 1) = -1.0;
    try {
        lemma2_gap(H, notpsd);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotPSD);
    }
}

TEST_CASE("optimality coefficients of a variance-optimal builder")
{
    const ProbeBuilder builder = [](const ResourceTriple& t) {
        const double dg = std::sqrt(t.g_var);
        ComplexMatrix G = ComplexMatrix::Zero(2, 2);
        G(0, 0) = t.g_mean - dg;
        G(1, 1) = t.g_mean + dg;
        DisentangledForm d = eigen_squeezed({0.0, 0.0});
        d.r.setConstant(std::asinh(std::sqrt(0.5 * t.n_signal)));
        return std::make_pair(d, from_matrix(G));
    };
    // Targets keep both eigenvalues away from zero so no mode turns into an idler.
    const OptimalityFit fit = optimality_coefficients(builder, {1.0, 2.0, 1.0, true});
    CHECK(fit.c_gbar == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(fit.c_dg == doctest::Approx(4.0).epsilon(1e-6));
    CHECK_THROWS_AS(optimality_coefficients(builder, {1.0, 1.0, 1.0, true}, {10.0, 20.0}), Error);
}
