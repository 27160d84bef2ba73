#pragma once

#include "gaussmet/gaussian.hpp"
#include "gaussmet/generator.hpp"
#include "gaussmet/metrology.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace gaussmet {

struct RegularizedModePair;

struct HomodyneSetup {
    std::vector<Eigen::Index> mode_indices;  // generator eigenbasis
    std::optional<std::vector<double>> phases;  // empty optional = auto
    double eta = 1.0;
    double sigma_env_sq = 1.0;  // shot-noise units, 1 = vacuum
    double true_param = 0.0;
};

struct HomodyneResult {
    double fi = 0.0;
    std::vector<double> per_mode_fi;
    std::vector<double> variances;
    std::vector<double> phases_used;
};

// sigma_env^2 = 2 N_B / (1 - eta) + 1
double sigma_env_from_thermal(double n_b, double eta);

void validate(const HomodyneSetup& setup);

// Populated eigenmodes (mean photon number above 1e-14).
std::vector<Eigen::Index> populated_modes(const DisentangledForm& d, const Generator& gen);

double homodyne_variance(const DisentangledForm& d, const Generator& gen, Eigen::Index mode, double phase,
                         double lambda, double eta, double sigma_env_sq);

// Phase at which the single-mode FI is maximal for the given eigenmode.
double optimal_homodyne_phase(const DisentangledForm& d, const Generator& gen, Eigen::Index mode, double lambda,
                              double eta, double sigma_env_sq);

HomodyneResult homodyne_fi(const DisentangledForm& d, const Generator& gen, const HomodyneSetup& setup);

struct SingleModeHomodyne {
    double fi = 0.0;
    double phase = 0.0;
    double variance = 0.0;
};

// Homodyne of one fixed (not necessarily eigen-) mode u of the a-basis; the
// phase is optimized numerically when not given.
SingleModeHomodyne homodyne_fi_mode(const DisentangledForm& d, const Generator& gen, const ComplexVector& u,
                                    std::optional<double> phase, double lambda, double eta, double sigma_env_sq);

// Joint homodyne of several fixed orthonormal modes (columns of U, a-basis),
// with the full outcome covariance. Missing phases are set per mode by
// homodyne_fi_mode.
SingleModeHomodyne homodyne_fi_modes(const DisentangledForm& d, const Generator& gen, const ComplexMatrix& U,
                                     std::optional<std::vector<double>> phases, double lambda, double eta,
                                     double sigma_env_sq, std::vector<double>* phases_used = nullptr);

// Quadrature samples, one stream per homodyned mode.
std::vector<std::vector<double>> sample_homodyne(const DisentangledForm& d, const Generator& gen,
                                                 const HomodyneSetup& setup, std::size_t n_samples,
                                                 std::uint64_t seed);

// Mean squared score of the per-mode Gaussian model, with d/dlambda taken by
// central differences of the log-density.
double empirical_fi(const DisentangledForm& d, const Generator& gen, const HomodyneSetup& setup,
                    std::size_t n_samples, std::uint64_t seed, double fd_step = 1e-4);

// QFI of the probe under G - gbar P_S.
double direct_detection_fi(const DisentangledForm& d, const Generator& gen);

struct CountingCheck {
    double max_arg_derivative = 0.0;
    bool satisfied = false;
};

CountingCheck counting_condition_check(const RegularizedModePair& pair, const DiscretizationGrid& grid,
                                       const std::vector<double>& shift_samples);

}  // namespace gaussmet
