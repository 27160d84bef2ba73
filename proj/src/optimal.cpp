#include "gaussmet/optimal.hpp"

#include "gaussmet/errors.hpp"

#include <cmath>
#include <limits>

namespace gaussmet {

namespace {

void validate(const ProbeSpec& spec)
{
    if (!(spec.n_signal > 0.0) || !std::isfinite(spec.n_signal))
        throw Error(ErrorCode::InvalidArgument, "n_signal must be positive");
    if (!std::isfinite(spec.target_gmean) || !std::isfinite(spec.target_gvar))
        throw Error(ErrorCode::NonFinite, "targets must be finite");
    if (spec.target_gvar < 0.0) throw Error(ErrorCode::InvalidArgument, "target_gvar must be >= 0");
}

// Nearest eigenvalue among the allowed indices; ties go to the smaller index.
Eigen::Index nearest(const RealVector& g, double target, const std::vector<Eigen::Index>& allowed)
{
    Eigen::Index best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index i : allowed) {
        const double d = std::abs(g(i) - target);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

std::vector<Eigen::Index> all_indices(Eigen::Index m)
{
    std::vector<Eigen::Index> v(static_cast<size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) v[static_cast<size_t>(i)] = i;
    return v;
}

void check_index(Eigen::Index i, Eigen::Index m)
{
    if (i < 0 || i >= m) throw Error(ErrorCode::InvalidArgument, "mode index out of range");
}

double squeeze_qfi(double g, double s2)
{
    return 8.0 * g * g * s2 * (s2 + 1.0);
}

// Eigenbasis-diagonal state with squeezings s2 on the given eigenmodes.
DisentangledForm eigenbasis_state(const Generator& gen, const std::vector<std::pair<Eigen::Index, double>>& sq,
                                  const std::vector<double>& angles)
{
    const Eigen::Index m = gen.dim();
    DisentangledForm d;
    d.V = gen.eig.U;
    d.r = RealVector::Zero(m);
    d.alpha = ComplexVector::Zero(m);
    for (size_t k = 0; k < sq.size(); ++k) {
        const Eigen::Index i = sq[k].first;
        d.r(i) = std::asinh(std::sqrt(sq[k].second));
        d.V.col(i) *= std::polar(1.0, 0.5 * angles[k]);
    }
    return d;
}

ProbeResult finish(ProbeResult res, const Generator& gen, ProbeKind kind)
{
    res.achieved = resources(res.state, gen);
    res.kind_used = kind;
    return res;
}

ProbeResult build_mean_optimal(const ProbeSpec& spec, const Generator& gen)
{
    const Eigen::Index m = gen.dim();
    ComplexVector u;
    if (spec.mode_vector) {
        u = *spec.mode_vector;
        if (u.size() != m) throw Error(ErrorCode::DimensionMismatch, "mode_vector has the wrong length");
        require_finite(u, "mode_vector");
        if (std::abs(u.norm() - 1.0) > 1e-9) throw Error(ErrorCode::InvalidArgument, "mode_vector must be normalized");
    } else {
        Eigen::Index n = 0;
        if (!spec.mode_choice.empty()) {
            n = spec.mode_choice[0];
            check_index(n, m);
        } else {
            gen.eig.eigvals.cwiseAbs().maxCoeff(&n);
        }
        u = gen.eig.U.col(n);
    }
    // Complete u to a unitary through a Householder QR whose first column is u.
    ComplexMatrix seed = ComplexMatrix::Identity(m, m);
    seed.col(0) = u;
    Eigen::HouseholderQR<ComplexMatrix> qr(seed);
    ComplexMatrix Q = qr.householderQ() * ComplexMatrix::Identity(m, m);
    const cplx ph = Q.col(0).dot(u);  // Q.col(0) = u up to a phase
    Q.col(0) *= ph / std::abs(ph);

    ProbeResult res;
    res.state.V = Q;
    res.state.V.col(0) *= std::polar(1.0, 0.5 * spec.squeeze_angles[0]);
    res.state.r = RealVector::Zero(m);
    res.state.r(0) = std::asinh(std::sqrt(spec.n_signal));
    res.state.alpha = ComplexVector::Zero(m);

    const double gnn = (u.adjoint() * gen.G * u)(0, 0).real();
    const double g2 = (u.adjoint() * gen.G * gen.G * u)(0, 0).real();
    const double s2 = spec.n_signal;
    res.predicted_qfi = squeeze_qfi(gnn, s2) + 4.0 * std::max(0.0, g2 - gnn * gnn) * s2;
    return finish(res, gen, ProbeKind::mean_optimal);
}

ProbeResult build_two_mode(const ProbeSpec& spec, const Generator& gen, ProbeKind kind)
{
    const RealVector& g = gen.eig.eigvals;
    const Eigen::Index m = gen.dim();
    const double gbar = spec.target_gmean;
    const double dg = std::sqrt(spec.target_gvar);
    const double n = spec.n_signal;

    std::array<double, 2> s2{0.5 * n, 0.5 * n};
    std::array<double, 2> need{gbar - dg, gbar + dg};
    if (kind == ProbeKind::optimal) {
        s2 = optimal_squeezings(n, gbar, dg);
        need = optimal_eigenvalues(n, gbar, dg);
    }

    ProbeResult res;
    Eigen::Index i = 0, j = 0;
    if (spec.mode_choice.size() >= 2) {
        i = spec.mode_choice[0];
        j = spec.mode_choice[1];
        check_index(i, m);
        check_index(j, m);
    } else {
        const auto all = all_indices(m);
        i = nearest(g, need[0], all);
        std::vector<Eigen::Index> rest;
        for (Eigen::Index k : all)
            if (k != i) rest.push_back(k);
        if (rest.empty()) throw Error(ErrorCode::SpectrumUnreachable, "two-mode probe needs at least two modes");
        j = nearest(g, need[1], rest);
    }
    if (i == j) throw Error(ErrorCode::InvalidArgument, "two-mode probe needs distinct modes");
    res.eigen_residual = std::max(std::abs(g(i) - need[0]), std::abs(g(j) - need[1]));
    const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
    if (spec.mode_choice.empty() && res.eigen_residual > spec.residual_tol * scale)
        throw Error(ErrorCode::SpectrumUnreachable, "required eigenvalues are not in the generator spectrum");

    res.state = eigenbasis_state(gen, {{i, s2[0]}, {j, s2[1]}}, {spec.squeeze_angles[0], spec.squeeze_angles[1]});
    res.predicted_qfi = squeeze_qfi(g(i), s2[0]) + squeeze_qfi(g(j), s2[1]);
    return finish(res, gen, kind);
}

ProbeResult build_derivative(const ProbeSpec& spec, const Generator& gen)
{
    const ComplexMatrix& G = gen.G;
    const Eigen::Index m = gen.dim();
    const double gmax = std::max(1.0, max_norm(G));
    const double zero = 1e-12 * gmax;

    auto partners = [&](Eigen::Index n) {
        std::vector<Eigen::Index> p;
        for (Eigen::Index k = 0; k < m; ++k)
            if (k != n && std::abs(G(k, n)) > zero) p.push_back(k);
        return p;
    };

    Eigen::Index base = -1, partner = -1;
    if (spec.mode_choice.size() >= 2) {
        base = spec.mode_choice[0];
        partner = spec.mode_choice[1];
        check_index(base, m);
        check_index(partner, m);
        const auto p = partners(base);
        if (p.size() != 1 || p[0] != partner)
            throw Error(ErrorCode::ConditionViolated, "base mode must couple only to the chosen partner");
    } else {
        for (Eigen::Index n = 0; n < m && base < 0; ++n) {
            const auto p = partners(n);
            if (p.size() == 1) {
                base = n;
                partner = p[0];
            }
        }
        if (base < 0) throw Error(ErrorCode::ConditionViolated, "no mode couples to exactly one partner");
    }
    if (std::abs(G(base, base) - G(partner, partner)) > 1e-9 * gmax)
        throw Error(ErrorCode::ConditionViolated, "diagonal generator entries of base and partner differ");

    const double n = spec.n_signal;
    const double a2 = 0.5 * n;
    const double s2 = 0.5 * n;
    const cplx gbp = G(base, partner);
    // Squeeze phase that makes the base/partner coupling real in the c-basis.
    const double phi = -2.0 * std::arg(gbp);

    ProbeResult res;
    res.state.V = ComplexMatrix::Identity(m, m);
    res.state.V(partner, partner) = std::polar(1.0, 0.5 * phi);
    res.state.r = RealVector::Zero(m);
    res.state.r(partner) = std::asinh(std::sqrt(s2));
    res.state.alpha = ComplexVector::Zero(m);
    res.state.alpha(base) = std::sqrt(a2);

    const double gb = G(base, base).real();
    const double d2 = std::norm(gbp);
    const double c2 = s2 + 1.0;
    const double sc = std::sqrt(s2 * c2);
    double extra = 0.0;
    for (Eigen::Index k = 0; k < m; ++k)
        if (k != base && k != partner) extra += std::norm(G(k, partner));
    res.predicted_qfi = 4.0 * (gb * gb * (a2 + 2.0 * c2 * s2) + d2 * ((2.0 * s2 + 1.0) * a2 + s2 + 2.0 * sc * a2))
                        + 4.0 * extra * s2;
    return finish(res, gen, ProbeKind::derivative_displaced);
}

ProbeResult build_idler(const ProbeSpec& spec, const Generator& gen)
{
    const RealVector& g = gen.eig.eigvals;
    const Eigen::Index m = gen.dim();
    const auto idlers = idler_indices(gen);
    const auto signals = signal_indices(gen);

    Eigen::Index i = 0, iI = 0, j = 0, jI = 0;
    const double gbar = spec.target_gmean;
    const double dg = std::sqrt(spec.target_gvar);
    const auto s2 = optimal_squeezings(spec.n_signal, gbar, dg);
    const auto need = optimal_eigenvalues(spec.n_signal, gbar, dg);
    ProbeResult res;
    if (spec.mode_choice.size() >= 4) {
        i = spec.mode_choice[0];
        iI = spec.mode_choice[1];
        j = spec.mode_choice[2];
        jI = spec.mode_choice[3];
        for (Eigen::Index k : {i, iI, j, jI}) check_index(k, m);
    } else {
        if (idlers.size() < 2) throw Error(ErrorCode::NoIdlerModes, "generator has fewer than two idler modes");
        if (signals.size() < 2) throw Error(ErrorCode::SpectrumUnreachable, "generator has fewer than two signal modes");
        iI = idlers[0];
        jI = idlers[1];
        i = nearest(g, need[0], signals);
        std::vector<Eigen::Index> rest;
        for (Eigen::Index k : signals)
            if (k != i) rest.push_back(k);
        j = nearest(g, need[1], rest);
    }
    res.eigen_residual = std::max(std::abs(g(i) - need[0]), std::abs(g(j) - need[1]));
    const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
    if (spec.mode_choice.empty() && res.eigen_residual > spec.residual_tol * scale)
        throw Error(ErrorCode::SpectrumUnreachable, "required eigenvalues are not in the generator spectrum");

    // Beam splitters at theta = pi/4, phi = 0 between each signal and its idler.
    ComplexMatrix W = ComplexMatrix::Identity(m, m);
    const double c = std::sqrt(0.5);
    for (auto [a, b] : {std::pair{i, iI}, std::pair{j, jI}}) {
        W(a, a) = c;
        W(a, b) = -c;
        W(b, a) = c;
        W(b, b) = c;
    }
    res.state.V = gen.eig.U * W;
    res.state.V.col(i) *= std::polar(1.0, 0.5 * spec.squeeze_angles[0]);
    res.state.V.col(iI) *= std::polar(1.0, 0.5 * spec.squeeze_angles[0]);
    res.state.V.col(j) *= std::polar(1.0, 0.5 * spec.squeeze_angles[1]);
    res.state.V.col(jI) *= std::polar(1.0, 0.5 * spec.squeeze_angles[1]);
    res.state.r = RealVector::Zero(m);
    res.state.r(i) = res.state.r(iI) = std::asinh(std::sqrt(s2[0]));
    res.state.r(j) = res.state.r(jI) = std::asinh(std::sqrt(s2[1]));
    res.state.alpha = ComplexVector::Zero(m);
    res.predicted_qfi = squeeze_qfi(g(i), s2[0]) + squeeze_qfi(g(j), s2[1]);
    return finish(res, gen, ProbeKind::idler_assisted);
}

}  // namespace

ProbeKind parse_probe_kind(const std::string& name)
{
    if (name == "optimal") return ProbeKind::optimal;
    if (name == "variance_optimal" || name == "variance-optimal") return ProbeKind::variance_optimal;
    if (name == "mean_optimal" || name == "mean-optimal") return ProbeKind::mean_optimal;
    if (name == "derivative_displaced" || name == "derivative") return ProbeKind::derivative_displaced;
    if (name == "idler_assisted" || name == "idler") return ProbeKind::idler_assisted;
    throw Error(ErrorCode::InvalidArgument, "unknown probe kind '" + name + "'");
}

std::string to_string(ProbeKind kind)
{
    switch (kind) {
    case ProbeKind::optimal: return "optimal";
    case ProbeKind::variance_optimal: return "variance_optimal";
    case ProbeKind::mean_optimal: return "mean_optimal";
    case ProbeKind::derivative_displaced: return "derivative_displaced";
    case ProbeKind::idler_assisted: return "idler_assisted";
    }
    return "unknown";
}

std::array<double, 2> optimal_squeezings(double n_signal, double gbar, double dg)
{
    const double norm = std::sqrt(gbar * gbar + dg * dg);
    const double x = norm > 0.0 ? gbar / norm : 0.0;
    return {0.5 * n_signal * (1.0 - x), 0.5 * n_signal * (1.0 + x)};
}

std::array<double, 2> optimal_eigenvalues(double n_signal, double gbar, double dg)
{
    const auto s2 = optimal_squeezings(n_signal, gbar, dg);
    if (s2[0] <= 0.0 || s2[1] <= 0.0) return {gbar, gbar};
    return {gbar - dg * std::sqrt(s2[1] / s2[0]), gbar + dg * std::sqrt(s2[0] / s2[1])};
}

ProbeResult build_probe(const ProbeSpec& spec, const Generator& gen)
{
    validate(spec);
    switch (spec.kind) {
    case ProbeKind::optimal:
        if (spec.target_gvar == 0.0) {
            // Degenerates to a single squeezed eigenmode at gbar.
            ProbeSpec ms = spec;
            ms.kind = ProbeKind::mean_optimal;
            if (ms.mode_choice.empty() && !ms.mode_vector) {
                const Eigen::Index n = nearest(gen.eig.eigvals, spec.target_gmean, all_indices(gen.dim()));
                const double resid = std::abs(gen.eig.eigvals(n) - spec.target_gmean);
                if (resid > spec.residual_tol * std::max(1.0, gen.eig.eigvals.cwiseAbs().maxCoeff()))
                    throw Error(ErrorCode::SpectrumUnreachable, "target mean is not in the generator spectrum");
                ms.mode_choice = {n};
                ProbeResult r = build_mean_optimal(ms, gen);
                r.eigen_residual = resid;
                return r;
            }
            return build_mean_optimal(ms, gen);
        }
        return build_two_mode(spec, gen, ProbeKind::optimal);
    case ProbeKind::variance_optimal: return build_two_mode(spec, gen, ProbeKind::variance_optimal);
    case ProbeKind::mean_optimal: return build_mean_optimal(spec, gen);
    case ProbeKind::derivative_displaced: return build_derivative(spec, gen);
    case ProbeKind::idler_assisted: return build_idler(spec, gen);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown probe kind");
}

}  // namespace gaussmet
