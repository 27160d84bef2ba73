#pragma once

#include "gaussmet/matkernel.hpp"

#include <string>

namespace gaussmet {

// psi = D(beta) S(f) |0>, with S(f) = exp(1/2 sum f_nm a_n^† a_m^† - h.c.).
struct GaussianPureState {
    int n_modes = 0;
    ComplexVector beta;
    ComplexMatrix f;
    std::string basis_label;
};

// Same state written as independent single-mode squeezed coherent states in
// the modes c_k^† = sum_n V_nk a_n^†.
struct DisentangledForm {
    ComplexMatrix V;
    ComplexVector alpha;
    RealVector r;
};

// Interleaved quadratures (q_1, p_1, q_2, p_2, ...), vacuum Sigma = identity.
struct CovarianceForm {
    RealVector mean;
    RealMatrix Sigma;
};

void validate(const GaussianPureState& state);
void validate(const DisentangledForm& d);

DisentangledForm disentangle(const GaussianPureState& state);

// Inverse of disentangle: f = V diag(r) V^T, beta = V alpha.
GaussianPureState assemble(const DisentangledForm& d, const std::string& basis_label = "");

// Covariance in the original a-basis.
CovarianceForm to_covariance(const DisentangledForm& d);

// Mean total photon number sum_k sinh^2 r_k + |alpha_k|^2.
double mean_photon_number(const DisentangledForm& d);
double mean_photon_number(const CovarianceForm& cov);

// Connected moments in the a-basis: <a_n a_m> - <a_n><a_m> and <a_n^† a_m> - <a_n^†><a_m>.
ComplexMatrix pair_moment(const DisentangledForm& d);
ComplexMatrix number_moment(const DisentangledForm& d);

}  // namespace gaussmet
