#include "gaussmet/metrology.hpp"

#include "gaussmet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gaussmet {

namespace {

void require_same_dim(const DisentangledForm& d, const Generator& gen)
{
    if (d.V.rows() != gen.dim()) throw Error(ErrorCode::DimensionMismatch, "state and generator dimensions differ");
}

// Leading coefficient of a least-squares polynomial fit of y in x = 1/N.
double extrapolate(const std::vector<double>& ns, const std::vector<double>& y)
{
    const Eigen::Index n = static_cast<Eigen::Index>(ns.size());
    const Eigen::Index order = n >= 4 ? 3 : 2;
    RealMatrix A(n, order);
    RealVector b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = 1.0 / ns[static_cast<size_t>(i)];
        double p = 1.0;
        for (Eigen::Index k = 0; k < order; ++k) {
            A(i, k) = p;
            p *= x;
        }
        b(i) = y[static_cast<size_t>(i)];
    }
    return A.colPivHouseholderQr().solve(b)(0);
}

}  // namespace

QfiWorkspace make_workspace(const DisentangledForm& d, const Generator& gen)
{
    validate(d);
    require_same_dim(d, gen);
    QfiWorkspace ws;
    ws.Gtilde = d.V.adjoint() * gen.G * d.V;
    ws.Gtilde = 0.5 * (ws.Gtilde + ws.Gtilde.adjoint());
    ws.C = d.r.array().cosh();
    ws.S = d.r.array().sinh();
    ws.alpha = d.alpha;
    ws.Amat = d.alpha * d.alpha.adjoint();
    ws.Bmat = d.alpha * d.alpha.transpose();
    return ws;
}

ResourceTriple resources(const DisentangledForm& d, const Generator& gen)
{
    const QfiWorkspace ws = make_workspace(d, gen);
    const ComplexMatrix Pt = d.V.adjoint() * signal_projector(gen) * d.V;
    const ComplexMatrix& Gt = ws.Gtilde;
    const ComplexMatrix G2 = Gt * Gt;
    const RealVector s2 = ws.S.array().square();

    auto weighted = [&](const ComplexMatrix& X) {
        double t = 0.0;
        for (Eigen::Index i = 0; i < X.rows(); ++i) t += X(i, i).real() * s2(i);
        return t + (ws.alpha.adjoint() * X * ws.alpha)(0, 0).real();
    };

    ResourceTriple res;
    res.n_signal = std::max(0.0, weighted(Pt));
    if (res.n_signal <= 1e-14) {
        res.n_signal = 0.0;
        return res;
    }
    res.defined = true;
    res.g_mean = weighted(Gt) / res.n_signal;
    res.g_var = weighted(G2) / res.n_signal - res.g_mean * res.g_mean;
    if (res.g_var < 0.0) res.g_var = 0.0;
    return res;
}

QfiReport qfi(const DisentangledForm& d, const Generator& gen)
{
    const QfiWorkspace ws = make_workspace(d, gen);
    const ComplexMatrix& Gt = ws.Gtilde;
    const Eigen::Index m = Gt.rows();
    RealVector cs(m), s2(m), c2(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        cs(i) = ws.C(i) * ws.S(i);
        s2(i) = ws.S(i) * ws.S(i);
        c2(i) = ws.C(i) * ws.C(i);
    }

    QfiReport rep;
    // Tr[G~ CS G~^* CS] and Tr[G~ S^2 G~ C^2] with diagonal C, S
    double ta = 0.0, tb = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            ta += (Gt(i, j) * cs(j) * std::conj(Gt(j, i)) * cs(i)).real();
            tb += std::norm(Gt(i, j)) * s2(j) * c2(i);
        }
    }
    rep.term_squeeze_a = ta;
    rep.term_squeeze_b = tb;

    const ComplexMatrix X = Gt * (s2 + c2).cast<cplx>().asDiagonal() * Gt;
    rep.term_disp = (ws.alpha.adjoint() * X * ws.alpha)(0, 0).real();
    const ComplexMatrix Y = Gt.conjugate() * cs.cast<cplx>().asDiagonal() * Gt;
    rep.term_cross = 2.0 * (ws.alpha.transpose() * Y * ws.alpha)(0, 0).real();

    rep.qfi = 4.0 * (rep.term_squeeze_a + rep.term_squeeze_b + rep.term_disp + rep.term_cross);
    if (rep.qfi < 0.0 && rep.qfi > -1e-9) rep.qfi = 0.0;
    rep.resources = resources(d, gen);
    rep.bound = qfi_upper_bound(rep.resources);
    rep.bound_satisfied = rep.qfi <= rep.bound + 1e-9 * std::max(1.0, rep.bound);
    return rep;
}

QfiReport qfi(const GaussianPureState& state, const Generator& gen)
{
    return qfi(disentangle(state), gen);
}

double coherent_qfi(const ResourceTriple& res)
{
    return 4.0 * (res.g_mean * res.g_mean + res.g_var) * res.n_signal;
}

double qfi_upper_bound(const ResourceTriple& res)
{
    const double n = res.n_signal;
    if (n <= 0.0) return 0.0;
    const double g2 = res.g_mean * res.g_mean;
    return (8.0 * g2 + 4.0 * res.g_var) * n * n + 8.0 * (g2 + res.g_var) * n;
}

double qfi_upper_bound_displaced(const DisentangledForm& d, const Generator& gen)
{
    const ResourceTriple res = resources(d, gen);
    if (!res.defined) return 0.0;
    const QfiWorkspace ws = make_workspace(d, gen);
    const ComplexMatrix G2 = ws.Gtilde * ws.Gtilde;
    double tr_g2s2 = 0.0;
    for (Eigen::Index i = 0; i < G2.rows(); ++i) tr_g2s2 += G2(i, i).real() * ws.S(i) * ws.S(i);
    const double agA = (ws.alpha.adjoint() * ws.Gtilde * ws.alpha)(0, 0).real();
    const double n = res.n_signal;
    const double g2 = res.g_mean * res.g_mean;
    return (8.0 * g2 + 4.0 * res.g_var) * n * n - 8.0 * agA * agA + 12.0 * (g2 + res.g_var) * n - 4.0 * tr_g2s2;
}

double lemma2_gap(const ComplexMatrix& H, const ComplexMatrix& Q)
{
    require_hermitian(H, "H");
    require_hermitian(Q, "Q");
    if (H.rows() != Q.rows()) throw Error(ErrorCode::DimensionMismatch, "H and Q dimensions differ");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (Q + Q.adjoint()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) < -1e-10) throw Error(ErrorCode::NotPSD, "Q has a negative eigenvalue");
    const ComplexMatrix HQ = H * Q;
    const double tr_hq = HQ.trace().real();
    const double tr_h2q = (H * HQ).trace().real();
    const double tr_q = Q.trace().real();
    const double tr_hqhq = (HQ * HQ).trace().real();
    return 4.0 * tr_hq * tr_hq + 4.0 * tr_h2q * tr_q - 8.0 * tr_hqhq;
}

OptimalityFit optimality_coefficients(const ProbeBuilder& builder, const ResourceTriple& res_targets,
                                      const std::vector<double>& ns_values)
{
    std::vector<double> ns = ns_values;
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    if (ns.size() < 3) throw Error(ErrorCode::FitIllConditioned, "need at least 3 distinct N_S values");
    for (double n : ns)
        if (!(n > 0.0)) throw Error(ErrorCode::FitIllConditioned, "N_S values must be positive");

    // Runs the builder on one (gbar, dg) setting; returns the achieved
    // (gbar^2, dg^2) and the extrapolated qfi / N_S^2.
    auto run = [&](double gbar, double dg, double& g2, double& d2) {
        std::vector<double> y;
        g2 = 0.0;
        d2 = 0.0;
        for (double n : ns) {
            ResourceTriple t{n, gbar, dg * dg, true};
            auto [state, gen] = builder(t);
            QfiReport rep = qfi(state, gen);
            const double na = rep.resources.n_signal;
            if (!(na > 0.0)) throw Error(ErrorCode::FitIllConditioned, "builder produced an empty probe");
            y.push_back(rep.qfi / (na * na));
            g2 += rep.resources.g_mean * rep.resources.g_mean;
            d2 += rep.resources.g_var;
        }
        g2 /= static_cast<double>(ns.size());
        d2 /= static_cast<double>(ns.size());
        return extrapolate(ns, y);
    };

    double g2a = 0.0, d2a = 0.0;
    const double ya = run(res_targets.g_mean, std::sqrt(std::max(0.0, res_targets.g_var)), g2a, d2a);

    // Second setting: the candidate that makes the 2x2 system best conditioned.
    const double candidates[][2] = {{1.0, 0.5}, {0.5, 1.0}, {1.0, 1.0}, {2.0, 0.5}};
    double best_cond = std::numeric_limits<double>::infinity();
    const double* best = nullptr;
    for (const auto& c : candidates) {
        Eigen::Matrix2d A;
        A << g2a, d2a, c[0] * c[0], c[1] * c[1];
        Eigen::JacobiSVD<Eigen::Matrix2d> svd(A);
        const double smin = svd.singularValues()(1);
        const double cond = smin > 0.0 ? svd.singularValues()(0) / smin : std::numeric_limits<double>::infinity();
        if (cond < best_cond) {
            best_cond = cond;
            best = c;
        }
    }
    if (best == nullptr || !(best_cond < 1e8))
        throw Error(ErrorCode::FitIllConditioned, "cannot separate gbar^2 and dg^2 contributions");

    double g2b = 0.0, d2b = 0.0;
    const double yb = run(best[0], best[1], g2b, d2b);
    Eigen::Matrix2d A;
    A << g2a, d2a, g2b, d2b;
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double smin = svd.singularValues()(1);
    if (!(smin > 0.0) || svd.singularValues()(0) / smin > 1e8)
        throw Error(ErrorCode::FitIllConditioned, "achieved resources do not separate gbar^2 and dg^2");
    Eigen::Vector2d coeffs = svd.solve(Eigen::Vector2d(ya, yb));
    return {coeffs(0), coeffs(1)};
}

}  // namespace gaussmet
