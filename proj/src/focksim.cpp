#include "gaussmet/focksim.hpp"

#include "gaussmet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace gaussmet {

namespace {

struct Lattice {
    int m;
    int dim1;                        // cutoff + 1
    std::vector<std::vector<int>> occ;  // occupations of each flat index
    std::vector<Eigen::Index> active;   // indices with total <= cutoff
    std::vector<Eigen::Index> stride;

    Lattice(int modes, int cutoff) : m(modes), dim1(cutoff + 1)
    {
        Eigen::Index total = 1;
        for (int k = 0; k < m; ++k) total *= dim1;
        stride.assign(static_cast<size_t>(m), 1);
        for (int k = m - 2; k >= 0; --k) stride[static_cast<size_t>(k)] = stride[static_cast<size_t>(k + 1)] * dim1;
        occ.resize(static_cast<size_t>(total));
        for (Eigen::Index idx = 0; idx < total; ++idx) {
            std::vector<int> o(static_cast<size_t>(m));
            Eigen::Index rest = idx;
            int sum = 0;
            for (int k = 0; k < m; ++k) {
                o[static_cast<size_t>(k)] = static_cast<int>(rest / stride[static_cast<size_t>(k)]);
                rest %= stride[static_cast<size_t>(k)];
                sum += o[static_cast<size_t>(k)];
            }
            occ[static_cast<size_t>(idx)] = o;
            if (sum <= cutoff) active.push_back(idx);
        }
    }
    Eigen::Index size() const { return static_cast<Eigen::Index>(occ.size()); }
};

void require_modes(int m)
{
    if (m < 1) throw Error(ErrorCode::InvalidArgument, "need at least one mode");
    if (m > kMaxFockModes) throw Error(ErrorCode::TooManyModes, "Fock oracle supports at most 3 modes");
}

// out = sum_nm H_nm a_n^† a_m v, restricted to the active (total <= cutoff) sector.
ComplexVector apply_quadratic(const Lattice& L, const ComplexMatrix& H, const ComplexVector& v)
{
    ComplexVector out = ComplexVector::Zero(v.size());
    for (Eigen::Index idx : L.active) {
        const cplx amp = v(idx);
        if (amp == cplx(0.0, 0.0)) continue;
        const auto& o = L.occ[static_cast<size_t>(idx)];
        for (int mm = 0; mm < L.m; ++mm) {
            const int nm = o[static_cast<size_t>(mm)];
            if (nm == 0) continue;
            for (int n = 0; n < L.m; ++n) {
                const cplx h = H(n, mm);
                if (h == cplx(0.0, 0.0)) continue;
                if (n == mm) {
                    out(idx) += h * static_cast<double>(nm) * amp;
                } else {
                    const int nn = o[static_cast<size_t>(n)];
                    const Eigen::Index target = idx - L.stride[static_cast<size_t>(mm)] + L.stride[static_cast<size_t>(n)];
                    out(target) += h * std::sqrt(static_cast<double>(nm) * (nn + 1)) * amp;
                }
            }
        }
    }
    return out;
}

// exp(-i t H^) v by a scaled Taylor series; H^ is number conserving.
ComplexVector evolve_quadratic(const Lattice& L, const ComplexMatrix& H, double t, const ComplexVector& v)
{
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (H + H.adjoint()), Eigen::EigenvaluesOnly);
    const double hnorm = es.eigenvalues().cwiseAbs().maxCoeff() * (L.dim1 - 1) * std::abs(t);
    if (hnorm == 0.0) return v;
    const int steps = std::max(1, static_cast<int>(std::ceil(hnorm / 0.5)));
    const cplx dt(0.0, -t / steps);
    ComplexVector x = v;
    for (int s = 0; s < steps; ++s) {
        ComplexVector term = x;
        ComplexVector acc = x;
        const double xn = x.norm();
        for (int k = 1; k < 60; ++k) {
            term = apply_quadratic(L, H, term) * (dt / static_cast<double>(k));
            acc += term;
            if (term.norm() <= 1e-17 * xn) break;
        }
        x = acc;
    }
    return x;
}

// Single-mode D(alpha) S(r e^{i phi}) |0> in a padded Fock space, first cutoff+1 entries.
ComplexVector single_mode_state(double r, cplx alpha, int cutoff)
{
    const int pad = std::max(60, 2 * cutoff + 40);
    const int dim = cutoff + 1 + pad;
    ComplexMatrix a = ComplexMatrix::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    const ComplexMatrix ad = a.adjoint();
    ComplexVector vac = ComplexVector::Zero(dim);
    vac(0) = 1.0;
    // S = exp(K) with K = r/2 (a^†2 - a^2) anti-Hermitian, so exp(K) = exp(-i (iK)).
    ComplexMatrix K = 0.5 * r * (ad * ad - a * a);
    ComplexMatrix Kd = alpha * ad - std::conj(alpha) * a;
    ComplexVector v = vac;
    if (r != 0.0) v = unitary_exp(cplx(0.0, 1.0) * K, 1.0, 1e-8) * v;
    if (alpha != cplx(0.0, 0.0)) v = unitary_exp(cplx(0.0, 1.0) * Kd, 1.0, 1e-8) * v;
    return v.head(cutoff + 1);
}

}  // namespace

void validate(const OracleConfig& cfg)
{
    if (cfg.cutoff < 1) throw Error(ErrorCode::InvalidArgument, "cutoff must be >= 1");
    if (cfg.cutoff > 60) throw Error(ErrorCode::InvalidArgument, "cutoff above 60 is not supported");
    if (!(cfg.fd_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "fd_step must be positive");
    if (!(cfg.tail_tol > 0.0 && cfg.tail_tol < 1.0)) throw Error(ErrorCode::InvalidArgument, "tail_tol must lie in (0, 1)");
}

FockStateVector fock_build(const DisentangledForm& d, const OracleConfig& cfg)
{
    validate(cfg);
    validate(d);
    const int m = static_cast<int>(d.V.rows());
    require_modes(m);
    const Lattice L(m, cfg.cutoff);

    std::vector<ComplexVector> single;
    for (int k = 0; k < m; ++k) single.push_back(single_mode_state(d.r(k), d.alpha(k), cfg.cutoff));

    FockStateVector psi;
    psi.n_modes = m;
    psi.cutoff = cfg.cutoff;
    psi.amplitudes = ComplexVector::Zero(L.size());
    for (Eigen::Index idx : L.active) {
        cplx amp(1.0, 0.0);
        const auto& o = L.occ[static_cast<size_t>(idx)];
        for (int k = 0; k < m; ++k) amp *= single[static_cast<size_t>(k)](o[static_cast<size_t>(k)]);
        psi.amplitudes(idx) = amp;
    }
    psi.norm_deficit = std::max(0.0, 1.0 - psi.amplitudes.squaredNorm());
    if (psi.norm_deficit > cfg.tail_tol)
        throw Error(ErrorCode::TailTooLarge, "truncated tail exceeds tail_tol; increase the cutoff");
    psi.amplitudes /= psi.amplitudes.norm();

    // The product state lives on the c-modes; rotate into the a-basis.
    if (!d.V.isIdentity(0.0)) psi = fock_apply_passive(psi, d.V);
    return psi;
}

FockStateVector fock_apply_passive(const FockStateVector& psi, const ComplexMatrix& W)
{
    require_modes(psi.n_modes);
    if (W.rows() != psi.n_modes || W.cols() != psi.n_modes)
        throw Error(ErrorCode::DimensionMismatch, "passive transform has the wrong size");
    const Lattice L(psi.n_modes, psi.cutoff);
    // W^ = exp(-i H^) with exp(-i H) = W.
    const ComplexMatrix H = unitary_log(W);
    FockStateVector out = psi;
    out.amplitudes = evolve_quadratic(L, H, 1.0, psi.amplitudes);
    return out;
}

FockStateVector fock_evolve(const FockStateVector& psi, const Generator& gen, double lambda)
{
    require_modes(psi.n_modes);
    if (gen.dim() != psi.n_modes) throw Error(ErrorCode::DimensionMismatch, "generator and state dimensions differ");
    const Lattice L(psi.n_modes, psi.cutoff);
    FockStateVector out = psi;
    out.amplitudes = evolve_quadratic(L, gen.G, lambda, psi.amplitudes);
    return out;
}

double fock_qfi(const FockStateVector& psi, const Generator& gen)
{
    require_modes(psi.n_modes);
    if (gen.dim() != psi.n_modes) throw Error(ErrorCode::DimensionMismatch, "generator and state dimensions differ");
    const Lattice L(psi.n_modes, psi.cutoff);
    const ComplexVector gv = apply_quadratic(L, gen.G, psi.amplitudes);
    const double norm2 = psi.amplitudes.squaredNorm();
    const double mean = psi.amplitudes.dot(gv).real() / norm2;
    const double second = gv.squaredNorm() / norm2;
    return 4.0 * std::max(0.0, second - mean * mean);
}

double fock_mean_photons(const FockStateVector& psi, int mode)
{
    require_modes(psi.n_modes);
    if (mode < 0 || mode >= psi.n_modes) throw Error(ErrorCode::InvalidArgument, "mode index out of range");
    const Lattice L(psi.n_modes, psi.cutoff);
    double n = 0.0;
    for (Eigen::Index idx = 0; idx < L.size(); ++idx)
        n += std::norm(psi.amplitudes(idx)) * L.occ[static_cast<size_t>(idx)][static_cast<size_t>(mode)];
    return n / psi.amplitudes.squaredNorm();
}

double fock_superposition_qfi(int n_cut, double g_min, double g_max)
{
    if (n_cut < 1) throw Error(ErrorCode::InvalidArgument, "n_cut must be >= 1");
    FockStateVector psi;
    psi.n_modes = 2;
    psi.cutoff = n_cut;
    const Lattice L(2, n_cut);
    psi.amplitudes = ComplexVector::Zero(L.size());
    psi.amplitudes(n_cut * L.stride[0]) = std::sqrt(0.5);  // |N, 0>
    psi.amplitudes(n_cut * L.stride[1]) = std::sqrt(0.5);  // |0, N>
    ComplexMatrix G = ComplexMatrix::Zero(2, 2);
    G(0, 0) = g_min;
    G(1, 1) = g_max;
    return fock_qfi(psi, from_matrix(G));
}

double fock_counting_fi(const std::function<FockStateVector(double)>& psi_builder,
                        const ComplexMatrix& basis_rotation, double lambda0, const OracleConfig& cfg)
{
    validate(cfg);
    auto probs = [&](double lam) {
        FockStateVector psi = psi_builder(lam);
        require_modes(psi.n_modes);
        if (basis_rotation.size() != 0) psi = fock_apply_passive(psi, basis_rotation.adjoint());
        RealVector p = psi.amplitudes.cwiseAbs2();
        return RealVector(p / p.sum());
    };
    const RealVector p0 = probs(lambda0);
    auto fi_at = [&](double h) {
        const RealVector pp = probs(lambda0 + h);
        const RealVector pm = probs(lambda0 - h);
        double fi = 0.0;
        for (Eigen::Index i = 0; i < p0.size(); ++i) {
            if (p0(i) < 1e-14) continue;
            const double dp = (pp(i) - pm(i)) / (2.0 * h);
            fi += dp * dp / p0(i);
        }
        return fi;
    };
    const double fi = fi_at(cfg.fd_step);
    const double fi_half = fi_at(0.5 * cfg.fd_step);
    if (std::abs(fi - fi_half) > 1e-4 * std::abs(fi_half) + 1e-9)
        throw Error(ErrorCode::NumericalInstability, "counting FI not converged in the finite-difference step");
    return fi_half;
}

}  // namespace gaussmet
