#include "gaussmet/generator.hpp"

#include "gaussmet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gaussmet {

double DiscretizationGrid::dp() const
{
    return 2.0 * std::numbers::pi / (z_max - z_min);
}

double DiscretizationGrid::dual_offset() const
{
    return p_min ? *p_min : -std::numbers::pi / dz() + 0.5 * dp();
}

ShiftDomain parse_shift_domain(const std::string& raw)
{
    std::string name = raw;
    std::replace(name.begin(), name.end(), '-', '_');
    if (name == "time_shift") return ShiftDomain::time_shift;
    if (name == "frequency_shift") return ShiftDomain::frequency_shift;
    if (name == "beam_displacement") return ShiftDomain::beam_displacement;
    if (name == "beam_tilt") return ShiftDomain::beam_tilt;
    throw Error(ErrorCode::InvalidArgument, "unknown shift domain '" + name + "'");
}

std::string to_string(ShiftDomain d)
{
    switch (d) {
    case ShiftDomain::time_shift: return "time_shift";
    case ShiftDomain::frequency_shift: return "frequency_shift";
    case ShiftDomain::beam_displacement: return "beam_displacement";
    case ShiftDomain::beam_tilt: return "beam_tilt";
    }
    return "unknown";
}

void validate(const DiscretizationGrid& grid)
{
    if (!std::isfinite(grid.z_min) || !std::isfinite(grid.z_max))
        throw Error(ErrorCode::NonFinite, "grid bounds must be finite");
    if (!(grid.z_max > grid.z_min)) throw Error(ErrorCode::InvalidArgument, "grid needs z_max > z_min");
    if (grid.n_bins < 1) throw Error(ErrorCode::InvalidArgument, "grid needs n_bins >= 1");
    if (grid.p_min && !std::isfinite(*grid.p_min)) throw Error(ErrorCode::NonFinite, "p_min must be finite");
}

Generator from_matrix(const ComplexMatrix& G, double signal_tol)
{
    if (!(signal_tol >= 0.0) || !std::isfinite(signal_tol))
        throw Error(ErrorCode::InvalidArgument, "signal_tol must be a finite non-negative number");
    Generator gen;
    gen.eig = hermitian_eig(G);
    gen.G = 0.5 * (G + G.adjoint());
    gen.signal_tol = signal_tol;
    return gen;
}

std::vector<Eigen::Index> idler_indices(const Generator& gen)
{
    const RealVector& g = gen.eig.eigvals;
    const double gmax = g.size() ? g.cwiseAbs().maxCoeff() : 0.0;
    std::vector<Eigen::Index> out;
    for (Eigen::Index i = 0; i < g.size(); ++i)
        if (std::abs(g(i)) <= gen.signal_tol * gmax) out.push_back(i);
    return out;
}

std::vector<Eigen::Index> signal_indices(const Generator& gen)
{
    const RealVector& g = gen.eig.eigvals;
    const double gmax = g.size() ? g.cwiseAbs().maxCoeff() : 0.0;
    std::vector<Eigen::Index> out;
    for (Eigen::Index i = 0; i < g.size(); ++i)
        if (std::abs(g(i)) > gen.signal_tol * gmax) out.push_back(i);
    return out;
}

ComplexMatrix signal_projector(const Generator& gen)
{
    const Eigen::Index m = gen.dim();
    ComplexMatrix P = ComplexMatrix::Zero(m, m);
    for (Eigen::Index i : signal_indices(gen)) P += gen.eig.U.col(i) * gen.eig.U.col(i).adjoint();
    return P;
}

Generator shift_generator(const DiscretizationGrid& grid, ShiftDomain domain, double physical_scale)
{
    validate(grid);
    if (!(physical_scale > 0.0) || !std::isfinite(physical_scale))
        throw Error(ErrorCode::InvalidArgument, "physical_scale must be positive");
    const int m = grid.n_bins;
    RealVector vals(m);
    for (int n = 0; n < m; ++n) vals(n) = physical_scale * (grid.z_min + n * grid.dz());
    Generator gen = from_matrix(vals.cast<cplx>().asDiagonal().toDenseMatrix());
    switch (domain) {
    case ShiftDomain::time_shift: gen.basis_label = "frequency_bins"; break;
    case ShiftDomain::frequency_shift: gen.basis_label = "time_bins"; break;
    case ShiftDomain::beam_displacement: gen.basis_label = "momentum_bins"; break;
    case ShiftDomain::beam_tilt: gen.basis_label = "position_bins"; break;
    }
    return gen;
}

Generator hg_generator(const HGParams& hg, int M)
{
    if (M < 2) throw Error(ErrorCode::InvalidArgument, "hg_generator needs M >= 2");
    if (!(hg.sigma_z > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma_z must be positive");
    const double pref = 1.0 / (std::sqrt(2.0) * hg.sigma_z);
    ComplexMatrix G = ComplexMatrix::Zero(M, M);
    for (int n = 0; n < M; ++n) {
        G(n, n) = hg.center_p;
        if (n + 1 < M) {
            // m = n + 1 above the diagonal, m = n below
            G(n, n + 1) = cplx(0.0, pref * std::sqrt((n + 1) / 2.0));
            G(n + 1, n) = cplx(0.0, -pref * std::sqrt((n + 1) / 2.0));
        }
    }
    Generator gen = from_matrix(G);
    gen.basis_label = "hermite_gauss";
    gen.dropped_coupling = pref * std::sqrt(M / 2.0);
    return gen;
}

double hermite_function(int n, double x)
{
    if (n < 0) return 0.0;
    double h0 = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
    if (n == 0) return h0;
    double h1 = std::sqrt(2.0) * x * h0;
    for (int k = 1; k < n; ++k) {
        double h2 = std::sqrt(2.0 / (k + 1)) * x * h1 - std::sqrt(static_cast<double>(k) / (k + 1)) * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

cplx hg_mode(int n, double z, const HGParams& hg)
{
    const double x = (z - hg.center_z) / (std::sqrt(2.0) * hg.sigma_z);
    const double amp = hermite_function(n, x) / std::pow(2.0 * hg.sigma_z * hg.sigma_z, 0.25);
    return std::polar(amp, -hg.center_p * (z - hg.center_z) - hg.theta);
}

Generator generator_from_modes(const ModeFamily& family, int M, double lambda0, double fd_step,
                               const DiscretizationGrid& quadrature_grid, double signal_tol)
{
    validate(quadrature_grid);
    if (M < 1) throw Error(ErrorCode::InvalidArgument, "need at least one mode");
    if (!(fd_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "fd_step must be positive");
    const int nodes = quadrature_grid.n_bins + 1;
    const double dz = quadrature_grid.dz();

    ComplexMatrix psi(nodes, M), dpsi(nodes, M);
    for (int m = 0; m < M; ++m) {
        for (int k = 0; k < nodes; ++k) {
            const double z = quadrature_grid.z_min + k * dz;
            psi(k, m) = family(m, z, lambda0);
            dpsi(k, m) = (family(m, z, lambda0 + fd_step) - family(m, z, lambda0 - fd_step)) / (2.0 * fd_step);
        }
    }
    RealVector w = RealVector::Constant(nodes, dz);
    w(0) *= 0.5;
    w(nodes - 1) *= 0.5;

    ComplexMatrix gram = psi.adjoint() * w.cast<cplx>().asDiagonal() * psi;
    if (max_norm(gram - ComplexMatrix::Identity(M, M)) > 1e-4)
        throw Error(ErrorCode::ModesNotOrthonormal, "mode family Gram matrix deviates from identity");

    ComplexMatrix G = cplx(0.0, 1.0) * (psi.adjoint() * w.cast<cplx>().asDiagonal() * dpsi);
    ComplexMatrix herm = 0.5 * (G + G.adjoint());
    Generator gen = from_matrix(herm, signal_tol);
    gen.antihermitian_residual = max_norm(0.5 * (G - G.adjoint()));
    gen.basis_label = "mode_family";
    return gen;
}

}  // namespace gaussmet
