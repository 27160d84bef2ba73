#pragma once

#include "gaussmet/gaussian.hpp"
#include "gaussmet/generator.hpp"
#include "gaussmet/metrology.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace gaussmet {

enum class ProbeKind { optimal, variance_optimal, mean_optimal, derivative_displaced, idler_assisted };

ProbeKind parse_probe_kind(const std::string& name);
std::string to_string(ProbeKind kind);

struct ProbeSpec {
    ProbeKind kind = ProbeKind::optimal;
    double n_signal = 1.0;
    double target_gmean = 0.0;
    double target_gvar = 0.0;
    std::array<double, 2> squeeze_angles{0.0, 0.0};
    // (i, j) for two-mode kinds, (i, i_I, j, j_I) for idler_assisted,
    // (base, partner) for derivative_displaced, (n) for mean_optimal.
    // Indices refer to the generator eigenbasis, except for
    // derivative_displaced which works in the generator's own basis.
    std::vector<Eigen::Index> mode_choice;
    // Explicit unit mode vector for mean_optimal, in the generator basis.
    std::optional<ComplexVector> mode_vector;
    // Largest tolerated distance between required and available eigenvalues.
    double residual_tol = 1e-9;
};

struct ProbeResult {
    DisentangledForm state;
    ResourceTriple achieved;
    double eigen_residual = 0.0;
    double predicted_qfi = 0.0;
    ProbeKind kind_used = ProbeKind::optimal;
};

// Optimal two-mode weights: s_i^2 = N/2 (1 - gbar / sqrt(gbar^2 + dg^2)), s_j^2 = N - s_i^2.
std::array<double, 2> optimal_squeezings(double n_signal, double gbar, double dg);

// Required eigenvalues g_i = gbar - dg sqrt(s_j^2/s_i^2), g_j = gbar + dg sqrt(s_i^2/s_j^2).
std::array<double, 2> optimal_eigenvalues(double n_signal, double gbar, double dg);

ProbeResult build_probe(const ProbeSpec& spec, const Generator& gen);

}  // namespace gaussmet
