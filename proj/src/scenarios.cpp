#include "gaussmet/scenarios.hpp"

#include "gaussmet/errors.hpp"
#include "gaussmet/measurement.hpp"
#include "gaussmet/optimal.hpp"
#include "gaussmet/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace gaussmet {

namespace {

cplx trapezoid_overlap(const HGParams& a, const HGParams& b, const DiscretizationGrid& grid)
{
    const int nodes = grid.n_bins + 1;
    const double dz = grid.dz();
    cplx acc(0.0, 0.0);
    for (int k = 0; k < nodes; ++k) {
        const double z = grid.z_min + k * dz;
        const double w = (k == 0 || k == nodes - 1) ? 0.5 : 1.0;
        acc += w * std::conj(hg_mode(0, z, a)) * hg_mode(0, z, b);
    }
    return acc * dz;
}

HGParams mode_params(const RegularizedModePair& pair, int n)
{
    return HGParams{pair.center_z[n], pair.center_p[n], pair.sigma_z, pair.theta[n]};
}

// Slot of HG level l of family f (0 = "+", 1 = "-") in the Schmidt-basis ordering
// (Psi_1, Psi_2, Phi_+1, Phi_-1, Phi_+2, Phi_-2, ...).
Eigen::Index slot(int family, int level)
{
    return level == 0 ? family : 2 + 2 * (level - 1) + family;
}

// The two Gaussian modes Phi_+ and Phi_- as columns in the Schmidt basis
// (exact in the good regularization limit).
ComplexMatrix gaussian_modes(const RegularizedProbe& rp)
{
    const double c = std::cos(rp.schmidt.chi), s = std::sin(rp.schmidt.chi);
    ComplexMatrix U = ComplexMatrix::Zero(rp.gen.dim(), 2);
    U(0, 0) = c;
    U(1, 0) = s;
    U(0, 1) = -s;
    U(1, 1) = c;
    return U;
}

std::string fmt(double x, int precision)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, x);
    return buf;
}

}  // namespace

void validate(const RegularizedModePair& pair)
{
    for (int n = 0; n < 2; ++n) {
        if (!std::isfinite(pair.center_z[n]) || !std::isfinite(pair.center_p[n]) || !std::isfinite(pair.theta[n])
            || !std::isfinite(pair.r[n]))
            throw Error(ErrorCode::NonFinite, "mode pair parameters must be finite");
        if (pair.r[n] < 0.0) throw Error(ErrorCode::InvalidArgument, "squeezing parameters must be >= 0");
    }
    if (!(pair.sigma_z > 0.0) || !std::isfinite(pair.sigma_z))
        throw Error(ErrorCode::InvalidArgument, "sigma_z must be positive");
}

void validate(const ScenarioConfig& cfg)
{
    validate(cfg.pair);
    if (!(cfg.n_signal > 0.0)) throw Error(ErrorCode::InvalidArgument, "n_signal must be positive");
    if (!(cfg.physical_scale > 0.0) || !std::isfinite(cfg.physical_scale))
        throw Error(ErrorCode::InvalidArgument, "physical_scale must be positive");
    if (cfg.n_hg_levels < 2) throw Error(ErrorCode::InvalidArgument, "n_hg_levels must be >= 2");
    for (double n : cfg.sweep.n_signal)
        if (!(n > 0.0)) throw Error(ErrorCode::InvalidArgument, "sweep n_signal values must be positive");
    for (double e : cfg.sweep.eta)
        if (!(e > 0.0 && e <= 1.0)) throw Error(ErrorCode::InvalidArgument, "sweep eta values must lie in (0, 1]");
}

RegularizedModePair core_pair(const ScenarioConfig& cfg)
{
    validate(cfg);
    const RegularizedModePair& p = cfg.pair;
    RegularizedModePair c = p;
    switch (cfg.kind) {
    case ShiftDomain::time_shift:
    case ShiftDomain::beam_displacement:
        break;
    case ShiftDomain::frequency_shift:
        // Frequency shifts are generated by time: swap the roles of t and omega.
        c.center_z = p.center_p;
        c.center_p = p.center_z;
        c.sigma_z = 1.0 / (2.0 * p.sigma_z);
        break;
    case ShiftDomain::beam_tilt: {
        // Tilt angle shifts k_x / (omega/c); the generator is (omega/c) x.
        const double s = cfg.physical_scale;
        for (int n = 0; n < 2; ++n) {
            c.center_z[n] = p.center_p[n] / s;
            c.center_p[n] = s * p.center_z[n];
        }
        c.sigma_z = 1.0 / (2.0 * p.sigma_z * s);
        break;
    }
    }
    return c;
}

DiscretizationGrid overlap_grid(const RegularizedModePair& pair, int n_bins)
{
    DiscretizationGrid g;
    g.z_min = std::min(pair.center_z[0], pair.center_z[1]) - 10.0 * pair.sigma_z;
    g.z_max = std::max(pair.center_z[0], pair.center_z[1]) + 10.0 * pair.sigma_z;
    g.n_bins = n_bins;
    return g;
}

cplx mode_overlap(const RegularizedModePair& pair, const DiscretizationGrid& grid)
{
    validate(pair);
    validate(grid);
    const double lo = std::min(pair.center_z[0], pair.center_z[1]) - 4.0 * pair.sigma_z;
    const double hi = std::max(pair.center_z[0], pair.center_z[1]) + 4.0 * pair.sigma_z;
    if (grid.z_min > lo || grid.z_max < hi)
        throw Error(ErrorCode::GridTooCoarse, "grid must cover +-4 sigma around both mode centers");
    const HGParams a = mode_params(pair, 0);
    const HGParams b = mode_params(pair, 1);
    const cplx s = trapezoid_overlap(a, b, grid);
    DiscretizationGrid fine = grid;
    fine.n_bins *= 2;
    const cplx s2 = trapezoid_overlap(a, b, fine);
    if (std::abs(std::abs(s2) - std::abs(s)) > 1e-8)
        throw Error(ErrorCode::GridTooCoarse, "overlap not converged on the quadrature grid");
    return s2;
}

SchmidtPairResult schmidt_pair(double r_plus, double r_minus, double overlap_mag)
{
    if (!(overlap_mag >= 0.0 && overlap_mag <= 1.0 + 1e-12))
        throw Error(ErrorCode::InvalidArgument, "overlap magnitude must lie in [0, 1]");
    const double S = std::min(overlap_mag, 1.0);
    const double root = std::sqrt(4.0 * r_minus * r_plus * S * S + (r_plus - r_minus) * (r_plus - r_minus));
    SchmidtPairResult out;
    out.r1 = 0.5 * (r_minus + r_plus + root);
    out.r2 = 0.5 * (r_minus + r_plus - root);
    out.overlap = S;
    if (r_plus == r_minus && S > 0.0)
        out.chi = 0.25 * std::numbers::pi;
    else
        out.chi = 0.5 * std::atan2(2.0 * r_minus * S * std::sqrt(1.0 - S * S), r_plus - r_minus + 2.0 * r_minus * S * S);
    return out;
}

RegularizedProbe build_regularized_probe(const ScenarioConfig& cfg, int n_hg_levels)
{
    if (n_hg_levels < 2) throw Error(ErrorCode::InvalidArgument, "n_hg_levels must be >= 2");
    const RegularizedModePair pair = core_pair(cfg);
    RegularizedProbe out;
    const cplx S = mode_overlap(pair, overlap_grid(pair));
    if (std::abs(S) >= 0.5) throw Error(ErrorCode::RegularizationPoor, "mode overlap too large for the Schmidt truncation");
    out.regularization_warning = std::abs(S) >= 1e-3;
    out.schmidt = schmidt_pair(pair.r[0], pair.r[1], std::abs(S));
    out.schmidt.overlap = S;

    const int L = n_hg_levels;
    const Eigen::Index m = 2 * L;
    ComplexMatrix Gphi = ComplexMatrix::Zero(m, m);
    for (int f = 0; f < 2; ++f) {
        const Generator hg = hg_generator(mode_params(pair, f), L);
        for (int a = 0; a < L; ++a)
            for (int b = 0; b < L; ++b) Gphi(slot(f, a), slot(f, b)) = hg.G(a, b);
    }
    // Psi_1 = cos chi Phi_+ - sin chi Phi_-, Psi_2 = sin chi Phi_+ + cos chi Phi_-
    const double c = std::cos(out.schmidt.chi), s = std::sin(out.schmidt.chi);
    ComplexMatrix T = ComplexMatrix::Identity(m, m);
    T(0, 0) = c;
    T(1, 0) = -s;
    T(0, 1) = s;
    T(1, 1) = c;
    out.gen = from_matrix(T.adjoint() * Gphi * T);
    out.gen.basis_label = "schmidt_hermite_gauss";

    out.state.V = ComplexMatrix::Identity(m, m);
    out.state.r = RealVector::Zero(m);
    out.state.r(0) = out.schmidt.r1;
    out.state.r(1) = out.schmidt.r2;
    out.state.alpha = ComplexVector::Zero(m);
    out.resources = resources(out.state, out.gen);
    return out;
}

double hg_product_qfi(double s0_sq, double s1_sq, double p0, double sigma_z, double phase_diff)
{
    if (s0_sq < 0.0 || s1_sq < 0.0) throw Error(ErrorCode::InvalidArgument, "squeezings must be >= 0");
    if (!(sigma_z > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma_z must be positive");
    const double s0 = std::sqrt(s0_sq), s1 = std::sqrt(s1_sq);
    const double c0_sq = s0_sq + 1.0, c1_sq = s1_sq + 1.0;
    const double c0 = std::sqrt(c0_sq), c1 = std::sqrt(c1_sq);
    const double sig2 = sigma_z * sigma_z;
    return (8.0 * p0 * p0 * sig2 * (c0_sq * s0_sq + c1_sq * s1_sq) + (c0_sq + 2.0) * s1_sq
            - 2.0 * c0 * c1 * s0 * s1 * std::cos(phase_diff) + c1_sq * s0_sq)
           / sig2;
}

ScenarioTable run_scenario(const ScenarioConfig& cfg)
{
    validate(cfg);
    const RegularizedModePair core = core_pair(cfg);
    const double p_mid = 0.5 * (core.center_p[0] + core.center_p[1]);
    const double delta = 0.5 * std::abs(core.center_p[0] - core.center_p[1]);
    const double z_mid = 0.5 * (core.center_z[0] + core.center_z[1]);
    const int L = cfg.n_hg_levels;

    ScenarioTable table;
    table.etas = cfg.sweep.eta.empty() ? std::vector<double>{1.0} : cfg.sweep.eta;
    const std::vector<double> ns = cfg.sweep.n_signal.empty() ? std::vector<double>{cfg.n_signal} : cfg.sweep.n_signal;

    struct Task {
        std::string kind;
        double n;
    };
    std::vector<Task> tasks;
    for (double n : ns)
        for (const auto& k : cfg.sweep.probe_kinds) tasks.push_back({k, n});
    for (const auto& t : tasks) {
        if (t.kind != "coherent" && t.kind != "mean_optimal" && t.kind != "derivative_displaced"
            && t.kind != "variance_optimal" && t.kind != "optimal")
            throw Error(ErrorCode::InvalidArgument, "unknown scenario probe kind '" + t.kind + "'");
    }

    // Pair probe in core variables: the regularized builder works on the core
    // directly, so hand it a time-shift config.
    auto pair_probe = [&](double p_lo, double p_hi, double s2_lo, double s2_hi) {
        ScenarioConfig c;
        c.kind = ShiftDomain::time_shift;
        c.pair = core;
        c.pair.center_p = {p_hi, p_lo};
        c.pair.r = {std::asinh(std::sqrt(s2_hi)), std::asinh(std::sqrt(s2_lo))};
        c.n_signal = s2_lo + s2_hi;
        c.n_hg_levels = L;
        return build_regularized_probe(c, L);
    };

    table.rows.resize(tasks.size());
    parallel_for(tasks.size(), [&](std::size_t idx) {
        const Task& t = tasks[idx];
        DisentangledForm state;
        Generator gen;
        ComplexMatrix det;  // homodyned modes, a-basis columns
        if (t.kind == "variance_optimal" || t.kind == "coherent") {
            RegularizedProbe rp = pair_probe(p_mid - delta, p_mid + delta, 0.5 * t.n, 0.5 * t.n);
            gen = rp.gen;
            state = rp.state;
            if (t.kind == "coherent") {
                state.r.setZero();
                state.alpha(0) = std::sqrt(0.5 * t.n);
                state.alpha(1) = std::sqrt(0.5 * t.n);
            }
            det = gaussian_modes(rp);
        } else if (t.kind == "optimal") {
            const auto s2 = optimal_squeezings(t.n, p_mid, delta);
            const auto g = optimal_eigenvalues(t.n, p_mid, delta);
            RegularizedProbe rp = pair_probe(g[0], g[1], s2[0], s2[1]);
            gen = rp.gen;
            state = rp.state;
            det = gaussian_modes(rp);
        } else {
            gen = hg_generator(HGParams{z_mid, p_mid, core.sigma_z, 0.0}, std::max(L, 3));
            ProbeSpec spec;
            spec.n_signal = t.n;
            spec.target_gmean = p_mid;
            if (t.kind == "mean_optimal") {
                spec.kind = ProbeKind::mean_optimal;
                spec.mode_vector = ComplexVector(ComplexVector::Unit(gen.dim(), 0));
                det = ComplexMatrix::Identity(gen.dim(), 1);
            } else {
                spec.kind = ProbeKind::derivative_displaced;
                spec.mode_choice = {0, 1};
                det = ComplexMatrix::Identity(gen.dim(), 2);
            }
            state = build_probe(spec, gen).state;
        }
        const QfiReport rep = qfi(state, gen);
        ScenarioRow row;
        row.probe_kind = t.kind;
        row.n_signal = rep.resources.n_signal;
        row.g_mean = rep.resources.g_mean;
        row.g_dev = std::sqrt(rep.resources.g_var);
        row.qfi = rep.qfi;
        row.bound = rep.bound;
        for (double eta : table.etas)
            row.homodyne_fi.push_back(homodyne_fi_modes(state, gen, det, std::nullopt, 0.0, eta, 1.0).fi);
        row.direct_fi = direct_detection_fi(state, gen);
        table.rows[idx] = row;
    });
    return table;
}

std::string scenario_csv(const ScenarioTable& table, int precision)
{
    std::ostringstream os;
    os << "probe_kind,N_S,gbar,dg,qfi,bound";
    for (double eta : table.etas) os << ",homodyne_fi(eta=" << fmt(eta, precision) << ")";
    os << ",direct_fi\n";
    for (const auto& r : table.rows) {
        os << r.probe_kind << ',' << fmt(r.n_signal, precision) << ',' << fmt(r.g_mean, precision) << ','
           << fmt(r.g_dev, precision) << ',' << fmt(r.qfi, precision) << ',' << fmt(r.bound, precision);
        for (double h : r.homodyne_fi) os << ',' << fmt(h, precision);
        os << ',' << fmt(r.direct_fi, precision) << '\n';
    }
    return os.str();
}

}  // namespace gaussmet
