#pragma once

#include "gaussmet/gaussian.hpp"
#include "gaussmet/generator.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace gaussmet {

struct QfiWorkspace {
    ComplexMatrix Gtilde;  // V^† G V
    RealVector C;          // cosh r
    RealVector S;          // sinh r
    ComplexMatrix Amat;    // alpha_i alpha_j^*
    ComplexMatrix Bmat;    // alpha_i alpha_j
    ComplexVector alpha;
};

struct ResourceTriple {
    double n_signal = 0.0;
    double g_mean = 0.0;
    double g_var = 0.0;
    bool defined = false;  // false when n_signal is (numerically) zero
};

struct QfiReport {
    double qfi = 0.0;
    double term_squeeze_a = 0.0;
    double term_squeeze_b = 0.0;
    double term_disp = 0.0;
    double term_cross = 0.0;
    ResourceTriple resources;
    double bound = 0.0;
    bool bound_satisfied = true;
};

QfiWorkspace make_workspace(const DisentangledForm& d, const Generator& gen);

ResourceTriple resources(const DisentangledForm& d, const Generator& gen);

QfiReport qfi(const DisentangledForm& d, const Generator& gen);
QfiReport qfi(const GaussianPureState& state, const Generator& gen);

// 4 (gbar^2 + dg^2) N_S for a coherent state.
double coherent_qfi(const ResourceTriple& res);

// (8 gbar^2 + 4 dg^2) N_S^2 + 8 (gbar^2 + dg^2) N_S
double qfi_upper_bound(const ResourceTriple& res);

// Stricter variant for displaced states:
// (8 gbar^2 + 4 dg^2) N^2 - 8 (alpha^† G~ alpha)^2 + 12 (gbar^2 + dg^2) N - 4 Tr[G~^2 S^2]
double qfi_upper_bound_displaced(const DisentangledForm& d, const Generator& gen);

// 4 Tr[HQ]^2 + 4 Tr[H^2 Q] Tr[Q] - 8 Tr[HQHQ]
double lemma2_gap(const ComplexMatrix& H, const ComplexMatrix& Q);

// Builds a probe with the requested (n_signal, g_mean, g_var), together with
// the generator it is meant for.
using ProbeBuilder = std::function<std::pair<DisentangledForm, Generator>(const ResourceTriple& target)>;

struct OptimalityFit {
    double c_gbar = 0.0;
    double c_dg = 0.0;
};

// Fits qfi / N_S^2 in powers of 1/N_S at two (gbar, dg) settings and solves
// for the asymptotic coefficients of gbar^2 and dg^2.
OptimalityFit optimality_coefficients(const ProbeBuilder& builder, const ResourceTriple& res_targets,
                                      const std::vector<double>& ns_values = {10.0, 20.0, 40.0, 80.0});

}  // namespace gaussmet
