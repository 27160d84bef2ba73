#include "gaussmet/randomized.hpp"

#include <cmath>
#include <numbers>

namespace gaussmet::randomized {

namespace {

cplx normal_complex(Rng& rng)
{
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

}  // namespace

ComplexMatrix hermitian(Eigen::Index m, Rng& rng, double scale)
{
    ComplexMatrix A(m, m);
    for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index i = 0; i < m; ++i) A(i, j) = normal_complex(rng);
    return 0.5 * scale * (A + A.adjoint());
}

ComplexMatrix unitary(Eigen::Index m, Rng& rng)
{
    ComplexMatrix A(m, m);
    for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index i = 0; i < m; ++i) A(i, j) = normal_complex(rng);
    Eigen::HouseholderQR<ComplexMatrix> qr(A);
    ComplexMatrix Q = qr.householderQ() * ComplexMatrix::Identity(m, m);
    const ComplexMatrix R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < m; ++j) {
        const double a = std::abs(R(j, j));
        if (a > 0.0) Q.col(j) *= R(j, j) / a;
    }
    return Q;
}

ComplexMatrix psd(Eigen::Index m, Rng& rng)
{
    std::uniform_int_distribution<Eigen::Index> rank_dist(1, m);
    const Eigen::Index k = rank_dist(rng);
    ComplexMatrix X(m, k);
    for (Eigen::Index j = 0; j < k; ++j)
        for (Eigen::Index i = 0; i < m; ++i) X(i, j) = normal_complex(rng);
    return X * X.adjoint();
}

DisentangledForm state(Eigen::Index m, Rng& rng, double max_s2, double max_a2)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    DisentangledForm d;
    d.V = unitary(m, rng);
    d.r.resize(m);
    d.alpha.resize(m);
    for (Eigen::Index k = 0; k < m; ++k) {
        d.r(k) = std::asinh(std::sqrt(max_s2 * u(rng)));
        const double amp = std::sqrt(max_a2 * u(rng));
        d.alpha(k) = std::polar(amp, 2.0 * std::numbers::pi * u(rng));
    }
    return d;
}

}  // namespace gaussmet::randomized
