#pragma once

#include "gaussmet/gaussian.hpp"
#include "gaussmet/generator.hpp"

#include <functional>

namespace gaussmet {

inline constexpr int kMaxFockModes = 3;

struct OracleConfig {
    int cutoff = 20;       // per-mode photon cutoff N_cut
    double fd_step = 1e-5;
    double tail_tol = 1e-10;
};

// Amplitudes over the lattice n_k in [0, cutoff], index sum_k n_k (cutoff+1)^(M-1-k).
// States produced here carry no weight above a total photon number of cutoff,
// so passive (number-conserving) operations act exactly on the lattice.
struct FockStateVector {
    int n_modes = 0;
    int cutoff = 0;
    ComplexVector amplitudes;
    double norm_deficit = 0.0;
};

void validate(const OracleConfig& cfg);

FockStateVector fock_build(const DisentangledForm& d, const OracleConfig& cfg);

// 4 (<G^2> - <G>^2) with G = sum G_nm a_n^† a_m.
double fock_qfi(const FockStateVector& psi, const Generator& gen);

// Applies the passive operator W^ with W^ a_k^† W^† = sum_n W_nk a_n^†.
FockStateVector fock_apply_passive(const FockStateVector& psi, const ComplexMatrix& W);

// exp(-i lambda G^) psi
FockStateVector fock_evolve(const FockStateVector& psi, const Generator& gen, double lambda);

double fock_mean_photons(const FockStateVector& psi, int mode);

double fock_superposition_qfi(int n_cut, double g_min, double g_max);

// Photon-counting FI in the modes d_k^† = sum_n W_nk a_n^† (W = basis_rotation,
// an empty matrix means the a-basis itself).
double fock_counting_fi(const std::function<FockStateVector(double)>& psi_builder,
                        const ComplexMatrix& basis_rotation, double lambda0, const OracleConfig& cfg);

}  // namespace gaussmet
