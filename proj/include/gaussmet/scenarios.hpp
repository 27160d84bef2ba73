#pragma once

#include "gaussmet/gaussian.hpp"
#include "gaussmet/generator.hpp"
#include "gaussmet/metrology.hpp"

#include <array>
#include <string>
#include <vector>

namespace gaussmet {

// Two Gaussian modes Phi_0(z; z_n, p_n, sigma_z, theta_n) squeezed with r_+ / r_-.
// Index 0 is the "+" mode, index 1 the "-" mode.
struct RegularizedModePair {
    std::array<double, 2> center_z{0.0, 0.0};
    std::array<double, 2> center_p{0.0, 0.0};
    double sigma_z = 1.0;
    std::array<double, 2> theta{0.0, 0.0};
    std::array<double, 2> r{0.0, 0.0};
};

struct SchmidtPairResult {
    double r1 = 0.0;
    double r2 = 0.0;
    double chi = 0.0;
    cplx overlap{0.0, 0.0};
};

struct ScenarioSweep {
    std::vector<double> n_signal;
    std::vector<double> eta{1.0};
    std::vector<std::string> probe_kinds{"coherent", "mean_optimal", "derivative_displaced", "variance_optimal",
                                         "optimal"};
};

// The pair is always given in the (z, p) = (t, omega) or (x, k_x) picture;
// kind selects which variable the estimated shift acts on.
struct ScenarioConfig {
    ShiftDomain kind = ShiftDomain::time_shift;
    RegularizedModePair pair;
    double n_signal = 1.0;
    double physical_scale = 1.0;  // omega / c for beam_tilt
    int n_hg_levels = 4;
    ScenarioSweep sweep;
};

struct RegularizedProbe {
    DisentangledForm state;
    Generator gen;
    ResourceTriple resources;
    SchmidtPairResult schmidt;
    bool regularization_warning = false;  // |S| >= 1e-3
};

struct ScenarioRow {
    std::string probe_kind;
    double n_signal = 0.0;
    double g_mean = 0.0;
    double g_dev = 0.0;
    double qfi = 0.0;
    double bound = 0.0;
    std::vector<double> homodyne_fi;  // one per sweep eta
    double direct_fi = 0.0;
};

struct ScenarioTable {
    std::vector<double> etas;
    std::vector<ScenarioRow> rows;
};

void validate(const RegularizedModePair& pair);
void validate(const ScenarioConfig& cfg);

// Pair expressed in the variables of the z-shift core for the given kind.
RegularizedModePair core_pair(const ScenarioConfig& cfg);

// Default quadrature grid covering both modes with +-10 sigma margin.
DiscretizationGrid overlap_grid(const RegularizedModePair& pair, int n_bins = 4096);

cplx mode_overlap(const RegularizedModePair& pair, const DiscretizationGrid& grid);

SchmidtPairResult schmidt_pair(double r_plus, double r_minus, double overlap_mag);

// Builds the regularized two-Gaussian-mode probe in the z-shift core variables.
RegularizedProbe build_regularized_probe(const ScenarioConfig& cfg, int n_hg_levels);

// Two-level HG product state with squeezings s0^2, s1^2 and squeeze phase difference.
double hg_product_qfi(double s0_sq, double s1_sq, double p0, double sigma_z, double phase_diff);

ScenarioTable run_scenario(const ScenarioConfig& cfg);

std::string scenario_csv(const ScenarioTable& table, int precision);

}  // namespace gaussmet
