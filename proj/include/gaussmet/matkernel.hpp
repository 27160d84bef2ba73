#pragma once

#include <Eigen/Dense>
#include <complex>

namespace gaussmet {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kDefaultTol = 1e-10;

struct HermitianEig {
    RealVector eigvals;  // ascending
    ComplexMatrix U;     // eigenvectors in columns
};

struct TakagiFactorization {
    ComplexMatrix V;  // f = V diag(r) V^T
    RealVector r;     // descending, >= 0
};

double max_norm(const ComplexMatrix& A);

bool all_finite(const ComplexMatrix& A);
bool is_hermitian(const ComplexMatrix& A, double tol = kDefaultTol);
bool is_symmetric(const ComplexMatrix& A, double tol = kDefaultTol);
bool is_unitary(const ComplexMatrix& U, double tol = kDefaultTol);

// Throw NonFinite / DimensionMismatch / NotHermitian as appropriate.
void require_finite(const ComplexMatrix& A, const char* what);
void require_hermitian(const ComplexMatrix& A, const char* what, double tol = kDefaultTol);

HermitianEig hermitian_eig(const ComplexMatrix& A, double tol = kDefaultTol);

TakagiFactorization takagi(const ComplexMatrix& f, double tol = kDefaultTol);

// exp(-i * scale * H)
ComplexMatrix unitary_exp(const ComplexMatrix& H, double scale, double tol = kDefaultTol);

// Hermitian H with exp(-i H) = U, spectrum in (-pi, pi].
ComplexMatrix unitary_log(const ComplexMatrix& U, double tol = kDefaultTol);

}  // namespace gaussmet
