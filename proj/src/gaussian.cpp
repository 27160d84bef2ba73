#include "gaussmet/gaussian.hpp"

#include "gaussmet/errors.hpp"

#include <cmath>

namespace gaussmet {

void validate(const GaussianPureState& state)
{
    const Eigen::Index m = state.n_modes;
    if (m <= 0) throw Error(ErrorCode::InvalidArgument, "n_modes must be positive");
    if (state.beta.size() != m || state.f.rows() != m || state.f.cols() != m)
        throw Error(ErrorCode::DimensionMismatch, "beta/f sizes do not match n_modes");
    require_finite(state.beta, "beta");
    require_finite(state.f, "f");
    if (!is_symmetric(state.f)) throw Error(ErrorCode::NotSymmetric, "f is not symmetric");
}

void validate(const DisentangledForm& d)
{
    const Eigen::Index m = d.V.rows();
    if (d.V.cols() != m || d.alpha.size() != m || d.r.size() != m)
        throw Error(ErrorCode::DimensionMismatch, "V/alpha/r sizes disagree");
    require_finite(d.V, "V");
    require_finite(d.alpha, "alpha");
    if (!d.r.allFinite()) throw Error(ErrorCode::NonFinite, "r has non-finite entries");
    if ((d.r.array() < 0.0).any()) throw Error(ErrorCode::InvalidArgument, "squeezing strengths must be >= 0");
    if (!is_unitary(d.V)) throw Error(ErrorCode::NotUnitary, "V is not unitary");
}

DisentangledForm disentangle(const GaussianPureState& state)
{
    validate(state);
    TakagiFactorization tk = takagi(state.f);
    DisentangledForm d;
    d.V = tk.V;
    d.r = tk.r;
    d.alpha = tk.V.adjoint() * state.beta;
    return d;
}

GaussianPureState assemble(const DisentangledForm& d, const std::string& basis_label)
{
    validate(d);
    GaussianPureState s;
    s.n_modes = static_cast<int>(d.V.rows());
    s.f = d.V * d.r.cast<cplx>().asDiagonal() * d.V.transpose();
    s.f = 0.5 * (s.f + s.f.transpose());
    s.beta = d.V * d.alpha;
    s.basis_label = basis_label;
    return s;
}

CovarianceForm to_covariance(const DisentangledForm& d)
{
    validate(d);
    const Eigen::Index m = d.V.rows();
    // a_n = sum_k V_nk c_k, so (q, p) of a follow from (q, p) of c through the
    // symplectic orthogonal block matrix [[X, -Y], [Y, X]], V = X + iY.
    RealMatrix O = RealMatrix::Zero(2 * m, 2 * m);
    for (Eigen::Index n = 0; n < m; ++n) {
        for (Eigen::Index k = 0; k < m; ++k) {
            const double x = d.V(n, k).real();
            const double y = d.V(n, k).imag();
            O(2 * n, 2 * k) = x;
            O(2 * n, 2 * k + 1) = -y;
            O(2 * n + 1, 2 * k) = y;
            O(2 * n + 1, 2 * k + 1) = x;
        }
    }
    RealMatrix Sc = RealMatrix::Zero(2 * m, 2 * m);
    RealVector mc(2 * m);
    for (Eigen::Index k = 0; k < m; ++k) {
        Sc(2 * k, 2 * k) = std::exp(2.0 * d.r(k));
        Sc(2 * k + 1, 2 * k + 1) = std::exp(-2.0 * d.r(k));
        mc(2 * k) = std::sqrt(2.0) * d.alpha(k).real();
        mc(2 * k + 1) = std::sqrt(2.0) * d.alpha(k).imag();
    }
    CovarianceForm cov;
    cov.Sigma = O * Sc * O.transpose();
    cov.Sigma = 0.5 * (cov.Sigma + cov.Sigma.transpose());
    cov.mean = O * mc;
    return cov;
}

double mean_photon_number(const DisentangledForm& d)
{
    double n = 0.0;
    for (Eigen::Index k = 0; k < d.r.size(); ++k) {
        const double s = std::sinh(d.r(k));
        n += s * s + std::norm(d.alpha(k));
    }
    return n;
}

double mean_photon_number(const CovarianceForm& cov)
{
    const double m = static_cast<double>(cov.Sigma.rows()) / 2.0;
    return (cov.Sigma.trace() - 2.0 * m) / 4.0 + cov.mean.squaredNorm() / 2.0;
}

ComplexMatrix pair_moment(const DisentangledForm& d)
{
    // <c_k c_k> = cosh r sinh r for S = exp(r/2 (c^†2 - c^2)).
    RealVector cs(d.r.size());
    for (Eigen::Index k = 0; k < d.r.size(); ++k) cs(k) = std::cosh(d.r(k)) * std::sinh(d.r(k));
    return d.V * cs.cast<cplx>().asDiagonal() * d.V.transpose();
}

ComplexMatrix number_moment(const DisentangledForm& d)
{
    RealVector s2(d.r.size());
    for (Eigen::Index k = 0; k < d.r.size(); ++k) s2(k) = std::sinh(d.r(k)) * std::sinh(d.r(k));
    return d.V.conjugate() * s2.cast<cplx>().asDiagonal() * d.V.transpose();
}

}  // namespace gaussmet
