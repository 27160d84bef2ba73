#pragma once

#include "gaussmet/matkernel.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gaussmet {

inline constexpr double kDefaultSignalTol = 1e-12;

struct Generator {
    ComplexMatrix G;
    HermitianEig eig;
    double signal_tol = kDefaultSignalTol;
    std::string basis_label;
    // Metadata filled by the specialised constructors.
    double dropped_coupling = 0.0;        // hg_generator truncation
    double antihermitian_residual = 0.0;  // generator_from_modes

    Eigen::Index dim() const { return G.rows(); }
    const RealVector& eigvals() const { return eig.eigvals; }
};

struct DiscretizationGrid {
    double z_min = 0.0;
    double z_max = 1.0;
    int n_bins = 1;
    std::optional<double> p_min;

    double dz() const { return (z_max - z_min) / n_bins; }
    double dp() const;
    double dual_offset() const;  // p_min or the centered default
};

struct HGParams {
    double center_z = 0.0;
    double center_p = 0.0;
    double sigma_z = 1.0;
    double theta = 0.0;
};

enum class ShiftDomain { time_shift, frequency_shift, beam_displacement, beam_tilt };

ShiftDomain parse_shift_domain(const std::string& name);
std::string to_string(ShiftDomain d);

void validate(const DiscretizationGrid& grid);

Generator from_matrix(const ComplexMatrix& G, double signal_tol = kDefaultSignalTol);

std::vector<Eigen::Index> idler_indices(const Generator& gen);
std::vector<Eigen::Index> signal_indices(const Generator& gen);

ComplexMatrix signal_projector(const Generator& gen);

Generator shift_generator(const DiscretizationGrid& grid, ShiftDomain domain, double physical_scale = 1.0);

// Tridiagonal z-shift generator in the HG basis, levels 0..M-1.
Generator hg_generator(const HGParams& hg, int M);

// Normalized Hermite function h_n(x), orthonormal on the real line.
double hermite_function(int n, double x);

// Phi_n(z) = h_n((z - z0)/(sqrt2 sigma)) / (2 sigma^2)^(1/4) e^{-i p0 (z - z0)} e^{-i theta}
cplx hg_mode(int n, double z, const HGParams& hg);

using ModeFamily = std::function<cplx(int n, double z, double lambda)>;

// -i G_nm = int Psi_n^* d_lambda Psi_m, by central differences and trapezoid
// quadrature on the n_bins + 1 grid nodes.
Generator generator_from_modes(const ModeFamily& family, int M, double lambda0, double fd_step,
                               const DiscretizationGrid& quadrature_grid,
                               double signal_tol = kDefaultSignalTol);

}  // namespace gaussmet
