#include "gaussmet/measurement.hpp"

#include "gaussmet/errors.hpp"
#include "gaussmet/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace gaussmet {

namespace {

// Connected moments of the eigenmodes b_i, where b_i^† = sum_n B_ni a_n^†.
struct EigenMoments {
    ComplexVector mean;  // <b_i>
    ComplexVector m2;    // <b_i b_i> - <b_i>^2
    RealVector nn;       // <b_i^† b_i> - |<b_i>|^2
};

EigenMoments eigen_moments(const DisentangledForm& d, const Generator& gen)
{
    validate(d);
    if (d.V.rows() != gen.dim()) throw Error(ErrorCode::DimensionMismatch, "state and generator dimensions differ");
    const ComplexMatrix& B = gen.eig.U;
    const ComplexMatrix Mb = B.adjoint() * pair_moment(d) * B.conjugate();
    const ComplexMatrix Nb = B.transpose() * number_moment(d) * B.conjugate();
    const double scale = 1.0 + std::max(max_norm(Mb), max_norm(Nb));
    const Eigen::Index m = gen.dim();
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            if (i == j) continue;
            if (std::abs(Mb(i, j)) > 1e-9 * scale || std::abs(Nb(i, j)) > 1e-9 * scale)
                throw Error(ErrorCode::StateNotEigenbasisDiagonal,
                            "state correlates different generator eigenmodes");
        }
    }
    EigenMoments em;
    em.mean = B.adjoint() * (d.V * d.alpha);
    em.m2 = Mb.diagonal();
    em.nn = Nb.diagonal().real();
    return em;
}

// Single Gaussian quadrature model x ~ N(mu, var) for one mode at lambda.
struct QuadModel {
    double mu;
    double var;
};

QuadModel eigen_quad(const EigenMoments& em, Eigen::Index n, double g, double phase, double lambda, double eta,
                     double sigma_env_sq)
{
    const double th = phase + lambda * g;
    const double v = (std::polar(1.0, -2.0 * th) * em.m2(n)).real() + em.nn(n) + 0.5;
    const double mu = std::sqrt(2.0) * (std::polar(1.0, -th) * em.mean(n)).real();
    return {std::sqrt(eta) * mu, eta * v + (1.0 - eta) * 0.5 * sigma_env_sq};
}

double gaussian_fi(double dmu, double dvar, double var)
{
    return dmu * dmu / var + dvar * dvar / (2.0 * var * var);
}

double eigen_mode_fi(const EigenMoments& em, Eigen::Index n, double g, double phase, double lambda, double eta,
                     double sigma_env_sq)
{
    const double th = phase + lambda * g;
    const QuadModel q = eigen_quad(em, n, g, phase, lambda, eta, sigma_env_sq);
    const double dvar = eta * (cplx(0.0, -2.0 * g) * std::polar(1.0, -2.0 * th) * em.m2(n)).real();
    const double dmu = std::sqrt(eta) * std::sqrt(2.0) * (cplx(0.0, -g) * std::polar(1.0, -th) * em.mean(n)).real();
    return gaussian_fi(dmu, dvar, q.var);
}

void check_mode(Eigen::Index n, const Generator& gen)
{
    if (n < 0 || n >= gen.dim()) throw Error(ErrorCode::InvalidArgument, "mode index out of range");
}

std::vector<Eigen::Index> setup_modes(const DisentangledForm& d, const Generator& gen, const HomodyneSetup& setup)
{
    std::vector<Eigen::Index> modes = setup.mode_indices;
    if (modes.empty()) modes = populated_modes(d, gen);
    for (Eigen::Index n : modes) check_mode(n, gen);
    if (setup.phases && setup.phases->size() != modes.size())
        throw Error(ErrorCode::DimensionMismatch, "number of phases does not match number of modes");
    return modes;
}

double auto_phase(const EigenMoments& em, Eigen::Index n, double g, double lambda, double eta, double sigma_env_sq)
{
    const double a = std::abs(em.m2(n));
    if (a > 0.0) {
        const double S = 2.0 * a;
        const double D = eta * (2.0 * em.nn(n) + 1.0) + (1.0 - eta) * sigma_env_sq;
        const double x = std::clamp(eta * S / D, -1.0, 1.0);
        return 0.5 * std::acos(x) - g * lambda + 0.5 * std::numbers::pi + 0.5 * std::arg(em.m2(n));
    }
    // Pure displacement: put the signal in the quadrature orthogonal to the mean.
    return std::arg(em.mean(n)) - 0.5 * std::numbers::pi - g * lambda;
}

}  // namespace

double sigma_env_from_thermal(double n_b, double eta)
{
    if (!(n_b >= 0.0)) throw Error(ErrorCode::InvalidArgument, "thermal occupation must be >= 0");
    if (!(eta > 0.0 && eta <= 1.0)) throw Error(ErrorCode::InvalidArgument, "eta must lie in (0, 1]");
    if (eta == 1.0) return 1.0;
    return 2.0 * n_b / (1.0 - eta) + 1.0;
}

void validate(const HomodyneSetup& setup)
{
    if (!(setup.eta > 0.0 && setup.eta <= 1.0)) throw Error(ErrorCode::InvalidArgument, "eta must lie in (0, 1]");
    if (!(setup.sigma_env_sq >= 1.0) || !std::isfinite(setup.sigma_env_sq))
        throw Error(ErrorCode::InvalidArgument, "sigma_env_sq must be >= 1");
    if (!std::isfinite(setup.true_param)) throw Error(ErrorCode::NonFinite, "true_param must be finite");
    if (setup.phases)
        for (double p : *setup.phases)
            if (!std::isfinite(p)) throw Error(ErrorCode::NonFinite, "phases must be finite");
}

std::vector<Eigen::Index> populated_modes(const DisentangledForm& d, const Generator& gen)
{
    const EigenMoments em = eigen_moments(d, gen);
    std::vector<Eigen::Index> out;
    for (Eigen::Index i = 0; i < gen.dim(); ++i)
        if (em.nn(i) + std::norm(em.mean(i)) > 1e-14) out.push_back(i);
    return out;
}

double homodyne_variance(const DisentangledForm& d, const Generator& gen, Eigen::Index mode, double phase,
                         double lambda, double eta, double sigma_env_sq)
{
    check_mode(mode, gen);
    HomodyneSetup s;
    s.eta = eta;
    s.sigma_env_sq = sigma_env_sq;
    validate(s);
    const EigenMoments em = eigen_moments(d, gen);
    return eigen_quad(em, mode, gen.eig.eigvals(mode), phase, lambda, eta, sigma_env_sq).var;
}

double optimal_homodyne_phase(const DisentangledForm& d, const Generator& gen, Eigen::Index mode, double lambda,
                              double eta, double sigma_env_sq)
{
    check_mode(mode, gen);
    const EigenMoments em = eigen_moments(d, gen);
    return auto_phase(em, mode, gen.eig.eigvals(mode), lambda, eta, sigma_env_sq);
}

HomodyneResult homodyne_fi(const DisentangledForm& d, const Generator& gen, const HomodyneSetup& setup)
{
    validate(setup);
    const EigenMoments em = eigen_moments(d, gen);
    const auto modes = setup_modes(d, gen, setup);
    HomodyneResult res;
    for (size_t k = 0; k < modes.size(); ++k) {
        const Eigen::Index n = modes[k];
        const double g = gen.eig.eigvals(n);
        const double phase = setup.phases ? (*setup.phases)[k]
                                          : auto_phase(em, n, g, setup.true_param, setup.eta, setup.sigma_env_sq);
        const double fi = eigen_mode_fi(em, n, g, phase, setup.true_param, setup.eta, setup.sigma_env_sq);
        res.per_mode_fi.push_back(fi);
        res.variances.push_back(eigen_quad(em, n, g, phase, setup.true_param, setup.eta, setup.sigma_env_sq).var);
        res.phases_used.push_back(phase);
        res.fi += fi;
    }
    return res;
}

SingleModeHomodyne homodyne_fi_mode(const DisentangledForm& d, const Generator& gen, const ComplexVector& u,
                                    std::optional<double> phase, double lambda, double eta, double sigma_env_sq)
{
    validate(d);
    HomodyneSetup s;
    s.eta = eta;
    s.sigma_env_sq = sigma_env_sq;
    s.true_param = lambda;
    validate(s);
    if (u.size() != gen.dim() || d.V.rows() != gen.dim())
        throw Error(ErrorCode::DimensionMismatch, "mode vector, state and generator dimensions differ");
    if (std::abs(u.norm() - 1.0) > 1e-9) throw Error(ErrorCode::InvalidArgument, "mode vector must be normalized");

    // The fixed detector mode u sees the evolved state like w = e^{i lambda G} u
    // sees the initial one.
    const ComplexMatrix& G = gen.G;
    const ComplexVector w = unitary_exp(G, -lambda) * u;
    const ComplexVector dw = cplx(0.0, 1.0) * (G * w);
    const ComplexMatrix M = pair_moment(d);
    const ComplexMatrix N = number_moment(d);
    const ComplexVector beta = d.V * d.alpha;

    const cplx m2 = (w.adjoint() * M * w.conjugate())(0, 0);
    const cplx dm2 = (dw.adjoint() * M * w.conjugate())(0, 0) + (w.adjoint() * M * dw.conjugate())(0, 0);
    const double nn = (w.transpose() * N * w.conjugate())(0, 0).real();
    const double dnn = ((dw.transpose() * N * w.conjugate())(0, 0) + (w.transpose() * N * dw.conjugate())(0, 0)).real();
    const cplx mu = (w.adjoint() * beta)(0, 0);
    const cplx dmu = (dw.adjoint() * beta)(0, 0);

    auto eval = [&](double ph, double* var_out) {
        const cplx e2 = std::polar(1.0, -2.0 * ph);
        const cplx e1 = std::polar(1.0, -ph);
        const double var = eta * ((e2 * m2).real() + nn + 0.5) + (1.0 - eta) * 0.5 * sigma_env_sq;
        const double dvar = eta * ((e2 * dm2).real() + dnn);
        const double dmean = std::sqrt(2.0 * eta) * (e1 * dmu).real();
        if (var_out) *var_out = var;
        return gaussian_fi(dmean, dvar, var);
    };

    SingleModeHomodyne out;
    if (phase) {
        out.phase = *phase;
    } else {
        const int n_scan = 2880;
        const double step = 2.0 * std::numbers::pi / n_scan;
        double best = -1.0;
        for (int k = 0; k < n_scan; ++k) {
            const double v = eval(k * step, nullptr);
            if (v > best) {
                best = v;
                out.phase = k * step;
            }
        }
        // golden-section refinement inside the bracketing cell
        double a = out.phase - step, b = out.phase + step;
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double c = b - gr * (b - a), e = a + gr * (b - a);
        double fc = eval(c, nullptr), fe = eval(e, nullptr);
        for (int it = 0; it < 100 && b - a > 1e-13; ++it) {
            if (fc > fe) {
                b = e;
                e = c;
                fe = fc;
                c = b - gr * (b - a);
                fc = eval(c, nullptr);
            } else {
                a = c;
                c = e;
                fc = fe;
                e = a + gr * (b - a);
                fe = eval(e, nullptr);
            }
        }
        const double mid = 0.5 * (a + b);
        if (eval(mid, nullptr) > best) out.phase = mid;
    }
    out.fi = eval(out.phase, &out.variance);
    return out;
}

SingleModeHomodyne homodyne_fi_modes(const DisentangledForm& d, const Generator& gen, const ComplexMatrix& U,
                                     std::optional<std::vector<double>> phases, double lambda, double eta,
                                     double sigma_env_sq, std::vector<double>* phases_used)
{
    validate(d);
    HomodyneSetup s;
    s.eta = eta;
    s.sigma_env_sq = sigma_env_sq;
    s.true_param = lambda;
    validate(s);
    const Eigen::Index k = U.cols();
    if (U.rows() != gen.dim() || d.V.rows() != gen.dim())
        throw Error(ErrorCode::DimensionMismatch, "mode matrix, state and generator dimensions differ");
    if (k == 0) return {};
    if (max_norm(U.adjoint() * U - ComplexMatrix::Identity(k, k)) > 1e-9)
        throw Error(ErrorCode::ModesNotOrthonormal, "homodyne modes must be orthonormal");
    if (phases && static_cast<Eigen::Index>(phases->size()) != k)
        throw Error(ErrorCode::DimensionMismatch, "number of phases does not match number of modes");

    std::vector<double> ph(static_cast<size_t>(k));
    for (Eigen::Index j = 0; j < k; ++j) {
        ph[static_cast<size_t>(j)] = phases ? (*phases)[static_cast<size_t>(j)]
                                            : homodyne_fi_mode(d, gen, U.col(j), std::nullopt, lambda, eta,
                                                               sigma_env_sq).phase;
    }
    if (phases_used) *phases_used = ph;

    // x_j = (v_j^† a + a^† v_j)/sqrt2 with v_j = e^{i lambda G} u_j e^{i phi_j}.
    const ComplexMatrix& G = gen.G;
    ComplexMatrix v = unitary_exp(G, -lambda) * U;
    for (Eigen::Index j = 0; j < k; ++j) v.col(j) *= std::polar(1.0, ph[static_cast<size_t>(j)]);
    const ComplexMatrix dv = cplx(0.0, 1.0) * (G * v);
    const ComplexMatrix M = pair_moment(d);
    const ComplexMatrix Nt = number_moment(d).transpose();
    const ComplexVector beta = d.V * d.alpha;

    RealMatrix cov(k, k), dcov(k, k);
    RealVector dmu(k);
    for (Eigen::Index a = 0; a < k; ++a) {
        dmu(a) = std::sqrt(2.0 * eta) * (dv.col(a).adjoint() * beta)(0, 0).real();
        for (Eigen::Index b = 0; b < k; ++b) {
            const cplx c = (v.col(a).adjoint() * M * v.col(b).conjugate())(0, 0)
                           + (v.col(a).adjoint() * Nt * v.col(b))(0, 0) + 0.5 * v.col(a).dot(v.col(b));
            const cplx dc = (dv.col(a).adjoint() * M * v.col(b).conjugate())(0, 0)
                            + (v.col(a).adjoint() * M * dv.col(b).conjugate())(0, 0)
                            + (dv.col(a).adjoint() * Nt * v.col(b))(0, 0)
                            + (v.col(a).adjoint() * Nt * dv.col(b))(0, 0);
            cov(a, b) = eta * c.real() + (a == b ? (1.0 - eta) * 0.5 * sigma_env_sq : 0.0);
            dcov(a, b) = eta * dc.real();
        }
    }
    cov = 0.5 * (cov + cov.transpose());
    dcov = 0.5 * (dcov + dcov.transpose());
    Eigen::LLT<RealMatrix> llt(cov);
    if (llt.info() != Eigen::Success) throw Error(ErrorCode::NumericalInstability, "homodyne covariance not positive");
    const RealMatrix X = llt.solve(dcov);
    SingleModeHomodyne out;
    out.fi = dmu.dot(llt.solve(dmu)) + 0.5 * (X * X).trace();
    out.phase = ph[0];
    out.variance = cov(0, 0);
    return out;
}

std::vector<std::vector<double>> sample_homodyne(const DisentangledForm& d, const Generator& gen,
                                                 const HomodyneSetup& setup, std::size_t n_samples,
                                                 std::uint64_t seed)
{
    validate(setup);
    const EigenMoments em = eigen_moments(d, gen);
    const auto modes = setup_modes(d, gen, setup);
    std::vector<std::vector<double>> out;
    for (size_t k = 0; k < modes.size(); ++k) {
        const Eigen::Index n = modes[k];
        const double g = gen.eig.eigvals(n);
        const double phase = setup.phases ? (*setup.phases)[k]
                                          : auto_phase(em, n, g, setup.true_param, setup.eta, setup.sigma_env_sq);
        const QuadModel q = eigen_quad(em, n, g, phase, setup.true_param, setup.eta, setup.sigma_env_sq);
        std::seed_seq sseq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                           static_cast<std::uint32_t>(k)};
        std::mt19937_64 rng(sseq);
        std::normal_distribution<double> dist(q.mu, std::sqrt(q.var));
        std::vector<double> xs(n_samples);
        for (auto& x : xs) x = dist(rng);
        out.push_back(std::move(xs));
    }
    return out;
}

double empirical_fi(const DisentangledForm& d, const Generator& gen, const HomodyneSetup& setup,
                    std::size_t n_samples, std::uint64_t seed, double fd_step)
{
    if (!(fd_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "fd_step must be positive");
    if (n_samples == 0) return 0.0;
    const auto samples = sample_homodyne(d, gen, setup, n_samples, seed);
    const EigenMoments em = eigen_moments(d, gen);
    const auto modes = setup_modes(d, gen, setup);
    const double lam = setup.true_param;

    std::vector<double> score(n_samples, 0.0);
    for (size_t k = 0; k < modes.size(); ++k) {
        const Eigen::Index n = modes[k];
        const double g = gen.eig.eigvals(n);
        // The measurement phase is fixed by the prior; only the state moves with lambda.
        const double phase = setup.phases ? (*setup.phases)[k]
                                          : auto_phase(em, n, g, lam, setup.eta, setup.sigma_env_sq);
        const QuadModel hi = eigen_quad(em, n, g, phase, lam + fd_step, setup.eta, setup.sigma_env_sq);
        const QuadModel lo = eigen_quad(em, n, g, phase, lam - fd_step, setup.eta, setup.sigma_env_sq);
        for (size_t s = 0; s < n_samples; ++s) {
            const double x = samples[k][s];
            const double lp_hi = -0.5 * (x - hi.mu) * (x - hi.mu) / hi.var - 0.5 * std::log(hi.var);
            const double lp_lo = -0.5 * (x - lo.mu) * (x - lo.mu) / lo.var - 0.5 * std::log(lo.var);
            score[s] += (lp_hi - lp_lo) / (2.0 * fd_step);
        }
    }
    double acc = 0.0;
    for (double s : score) acc += s * s;
    return acc / static_cast<double>(n_samples);
}

double direct_detection_fi(const DisentangledForm& d, const Generator& gen)
{
    const ResourceTriple res = resources(d, gen);
    if (!res.defined) return 0.0;
    Generator shifted = from_matrix(gen.G - res.g_mean * signal_projector(gen), gen.signal_tol);
    return qfi(d, shifted).qfi;
}

CountingCheck counting_condition_check(const RegularizedModePair& pair, const DiscretizationGrid& grid,
                                       const std::vector<double>& shift_samples)
{
    validate(pair);
    validate(grid);
    // Mean-shifted two-photon amplitude g(z, z~) = sum_n r_n Phi_n(z) Phi_n(z~).
    const double w0 = std::sinh(pair.r[0]) * std::sinh(pair.r[0]);
    const double w1 = std::sinh(pair.r[1]) * std::sinh(pair.r[1]);
    const double pbar = (w0 + w1) > 0.0 ? (w0 * pair.center_p[0] + w1 * pair.center_p[1]) / (w0 + w1)
                                        : 0.5 * (pair.center_p[0] + pair.center_p[1]);
    std::array<HGParams, 2> hp;
    for (int n = 0; n < 2; ++n)
        hp[n] = HGParams{pair.center_z[n], pair.center_p[n] - pbar, pair.sigma_z, pair.theta[n]};

    const double s2 = pair.sigma_z * pair.sigma_z;
    auto phi = [&](int n, double z, cplx& dphi) {
        const cplx v = hg_mode(0, z, hp[n]);
        dphi = v * cplx(-(z - hp[n].center_z) / (2.0 * s2), -hp[n].center_p);
        return v;
    };

    CountingCheck out;
    const double dz = grid.dz();
    for (double a : shift_samples) {
        for (int i = 0; i < grid.n_bins; ++i) {
            const double z = grid.z_min + (i + 0.5) * dz + a;
            for (int j = 0; j < grid.n_bins; ++j) {
                const double zt = grid.z_min + (j + 0.5) * dz + a;
                cplx g(0.0, 0.0), dg(0.0, 0.0);
                for (int n = 0; n < 2; ++n) {
                    cplx d1, d2;
                    const cplx p1 = phi(n, z, d1);
                    const cplx p2 = phi(n, zt, d2);
                    g += pair.r[n] * p1 * p2;
                    dg += pair.r[n] * (d1 * p2 + p1 * d2);
                }
                const double mag2 = std::norm(g);
                if (std::sqrt(mag2) < 1e-12) continue;
                const double darg = std::abs((dg * std::conj(g)).imag() / mag2);
                out.max_arg_derivative = std::max(out.max_arg_derivative, darg);
            }
        }
    }
    out.satisfied = out.max_arg_derivative < 1e-6;
    return out;
}

}  // namespace gaussmet
