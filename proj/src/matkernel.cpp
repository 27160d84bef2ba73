#include "gaussmet/matkernel.hpp"

#include "gaussmet/errors.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace gaussmet {

namespace {

// Rotate each column so its largest-magnitude entry is real positive.
void normalize_column_phases(ComplexMatrix& U)
{
    for (Eigen::Index j = 0; j < U.cols(); ++j) {
        Eigen::Index best = 0;
        double best_abs = -1.0;
        for (Eigen::Index i = 0; i < U.rows(); ++i) {
            double a = std::abs(U(i, j));
            if (a > best_abs * (1.0 + 1e-12) + 1e-300) {
                best_abs = a;
                best = i;
            }
        }
        if (best_abs > 0.0) {
            cplx ph = std::conj(U(best, j)) / best_abs;
            U.col(j) *= ph;
        }
    }
}

// Replace the columns [b, e) of U by an orthonormal basis of the same span
// obtained from projections of canonical basis vectors, largest first.
void canonicalize_cluster(ComplexMatrix& U, Eigen::Index b, Eigen::Index e)
{
    const Eigen::Index n = U.rows();
    const Eigen::Index k = e - b;
    ComplexMatrix Q = U.middleCols(b, k);
    ComplexMatrix P = Q * Q.adjoint();
    std::vector<ComplexVector> basis;
    std::vector<bool> used(static_cast<size_t>(n), false);
    for (Eigen::Index step = 0; step < k; ++step) {
        Eigen::Index pick = -1;
        double pick_norm = -1.0;
        ComplexVector pick_vec;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (used[static_cast<size_t>(j)]) continue;
            ComplexVector v = P.col(j);
            for (const auto& q : basis) v -= q * q.dot(v);
            double nv = v.norm();
            if (nv > pick_norm * (1.0 + 1e-9)) {
                pick_norm = nv;
                pick = j;
                pick_vec = v;
            }
        }
        used[static_cast<size_t>(pick)] = true;
        basis.push_back(pick_vec / pick_norm);
    }
    for (Eigen::Index j = 0; j < k; ++j) U.col(b + j) = basis[static_cast<size_t>(j)];
}

}  // namespace

double max_norm(const ComplexMatrix& A)
{
    return A.size() == 0 ? 0.0 : A.cwiseAbs().maxCoeff();
}

bool all_finite(const ComplexMatrix& A)
{
    for (Eigen::Index i = 0; i < A.size(); ++i) {
        const cplx z = A.data()[i];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
}

bool is_hermitian(const ComplexMatrix& A, double tol)
{
    if (A.rows() != A.cols()) return false;
    return max_norm(A - A.adjoint()) <= tol * std::max(1.0, max_norm(A));
}

bool is_symmetric(const ComplexMatrix& A, double tol)
{
    if (A.rows() != A.cols()) return false;
    return max_norm(A - A.transpose()) <= tol * std::max(1.0, max_norm(A));
}

bool is_unitary(const ComplexMatrix& U, double tol)
{
    if (U.rows() != U.cols()) return false;
    return max_norm(U.adjoint() * U - ComplexMatrix::Identity(U.rows(), U.cols())) <= tol;
}

void require_finite(const ComplexMatrix& A, const char* what)
{
    if (!all_finite(A)) throw Error(ErrorCode::NonFinite, std::string(what) + " has non-finite entries");
}

void require_hermitian(const ComplexMatrix& A, const char* what, double tol)
{
    require_finite(A, what);
    if (A.rows() != A.cols())
        throw Error(ErrorCode::DimensionMismatch, std::string(what) + " is not square");
    if (!is_hermitian(A, tol)) throw Error(ErrorCode::NotHermitian, std::string(what) + " is not Hermitian");
}

HermitianEig hermitian_eig(const ComplexMatrix& A, double tol)
{
    require_hermitian(A, "matrix", tol);
    const Eigen::Index n = A.rows();
    ComplexMatrix H = 0.5 * (A + A.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(H);
    if (es.info() != Eigen::Success)
        throw Error(ErrorCode::NumericalInstability, "eigensolver did not converge");

    HermitianEig out{es.eigenvalues(), es.eigenvectors()};
    const double gap = 1e-9 * std::max(max_norm(A), 1e-300);
    Eigen::Index b = 0;
    while (b < n) {
        Eigen::Index e = b + 1;
        while (e < n && out.eigvals(e) - out.eigvals(e - 1) < gap) ++e;
        if (e - b > 1) canonicalize_cluster(out.U, b, e);
        b = e;
    }
    normalize_column_phases(out.U);
    return out;
}

TakagiFactorization takagi(const ComplexMatrix& f, double tol)
{
    require_finite(f, "squeezing matrix");
    if (f.rows() != f.cols()) throw Error(ErrorCode::DimensionMismatch, "squeezing matrix is not square");
    if (!is_symmetric(f, tol)) throw Error(ErrorCode::NotSymmetric, "squeezing matrix is not symmetric");
    const Eigen::Index n = f.rows();
    const double fmax = max_norm(f);
    TakagiFactorization out{ComplexMatrix::Identity(n, n), RealVector::Zero(n)};
    if (fmax == 0.0) return out;

    ComplexMatrix fs = 0.5 * (f + f.transpose());
    Eigen::JacobiSVD<ComplexMatrix> svd(fs, Eigen::ComputeFullU);
    ComplexMatrix U = svd.matrixU();
    RealVector sv = svd.singularValues();

    // Singular values come out descending; split into near-degenerate blocks.
    const double gap = 1e-6 * sv(0);
    ComplexMatrix V(n, n);
    Eigen::Index b = 0;
    while (b < n) {
        Eigen::Index e = b + 1;
        while (e < n && sv(e - 1) - sv(e) <= gap) ++e;
        const Eigen::Index k = e - b;
        ComplexMatrix Ub = U.middleCols(b, k);
        if (sv(b) <= 1e-14 * sv(0)) {
            // null space: any unitary completion works
            V.middleCols(b, k) = Ub;
        } else if (k == 1) {
            cplx d = (Ub.adjoint() * fs * Ub.conjugate())(0, 0);
            V.col(b) = Ub * std::polar(1.0, 0.5 * std::arg(d));
        } else {
            // B = Ub^† f Ub^* is symmetric with singular values all ~ sv(b).
            // Takagi of B via the real embedding [[X, Y], [Y, -X]]: its positive
            // eigenvectors (u; v) give Takagi vectors w = u + i v.
            ComplexMatrix B = Ub.adjoint() * fs * Ub.conjugate();
            B = 0.5 * (B + B.transpose());
            RealMatrix E(2 * k, 2 * k);
            E.topLeftCorner(k, k) = B.real();
            E.topRightCorner(k, k) = B.imag();
            E.bottomLeftCorner(k, k) = B.imag();
            E.bottomRightCorner(k, k) = -B.real();
            Eigen::SelfAdjointEigenSolver<RealMatrix> es(E);
            ComplexMatrix W(k, k);
            for (Eigen::Index j = 0; j < k; ++j) {
                Eigen::Index c = 2 * k - 1 - j;  // largest eigenvalues first
                RealVector u = es.eigenvectors().col(c).head(k);
                RealVector v = es.eigenvectors().col(c).tail(k);
                W.col(j) = (u.cast<cplx>() + cplx(0, 1) * v.cast<cplx>());
            }
            // Orthonormalize (eigenvectors of E with distinct positive
            // eigenvalues already map to orthogonal w; re-polish for ties).
            Eigen::HouseholderQR<ComplexMatrix> qr(W);
            ComplexMatrix Q = qr.householderQ() * ComplexMatrix::Identity(k, k);
            ComplexMatrix R = qr.matrixQR().triangularView<Eigen::Upper>();
            for (Eigen::Index j = 0; j < k; ++j) {
                if (std::abs(R(j, j)) > 0.0) Q.col(j) *= R(j, j) / std::abs(R(j, j));
            }
            // Fix residual phases so that diag(Q^† B Q^*) is real positive.
            for (Eigen::Index j = 0; j < k; ++j) {
                cplx d = Q.col(j).adjoint() * B * Q.col(j).conjugate();
                Q.col(j) *= std::polar(1.0, 0.5 * std::arg(d));
            }
            V.middleCols(b, k) = Ub * Q;
        }
        b = e;
    }

    // Exact r from the diagonal of V^† f V^*, then a deterministic sign choice.
    ComplexMatrix D = V.adjoint() * fs * V.conjugate();
    for (Eigen::Index j = 0; j < n; ++j) {
        out.r(j) = std::max(0.0, D(j, j).real());
        Eigen::Index best = 0;
        V.col(j).cwiseAbs().maxCoeff(&best);
        if (V(best, j).real() < 0.0) V.col(j) = -V.col(j);
    }
    // Rounding inside a degenerate block can break the descending order.
    std::vector<Eigen::Index> perm(static_cast<size_t>(n));
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    std::stable_sort(perm.begin(), perm.end(), [&](Eigen::Index a, Eigen::Index b) { return out.r(a) > out.r(b); });
    const RealVector r_sorted = out.r;
    out.V.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        out.r(j) = r_sorted(perm[static_cast<size_t>(j)]);
        out.V.col(j) = V.col(perm[static_cast<size_t>(j)]);
    }
    V = out.V;

    if (max_norm(f - V * out.r.cast<cplx>().asDiagonal() * V.transpose()) > 1e-9 * (1.0 + fmax))
        throw Error(ErrorCode::NumericalInstability, "Takagi reconstruction failed");
    return out;
}

ComplexMatrix unitary_exp(const ComplexMatrix& H, double scale, double tol)
{
    require_hermitian(H, "generator", tol);
    if (!std::isfinite(scale)) throw Error(ErrorCode::NonFinite, "scale is not finite");
    const Eigen::Index n = H.rows();
    if (scale == 0.0) return ComplexMatrix::Identity(n, n);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (H + H.adjoint()));
    ComplexVector ph(n);
    for (Eigen::Index i = 0; i < n; ++i) ph(i) = std::polar(1.0, -scale * es.eigenvalues()(i));
    const ComplexMatrix& Q = es.eigenvectors();
    return Q * ph.asDiagonal() * Q.adjoint();
}

ComplexMatrix unitary_log(const ComplexMatrix& U, double tol)
{
    require_finite(U, "unitary");
    if (!is_unitary(U, std::max(tol, 1e-9))) throw Error(ErrorCode::NotUnitary, "matrix is not unitary");
    const Eigen::Index n = U.rows();
    Eigen::ComplexSchur<ComplexMatrix> schur(U);
    const ComplexMatrix& Z = schur.matrixU();
    const ComplexMatrix& T = schur.matrixT();
    ComplexVector theta(n);
    for (Eigen::Index i = 0; i < n; ++i) theta(i) = -std::arg(T(i, i));
    ComplexMatrix H = Z * theta.asDiagonal() * Z.adjoint();
    return 0.5 * (H + H.adjoint());
}

}  // namespace gaussmet
