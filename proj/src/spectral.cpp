#include "zndstab/spectral.hpp"
#include "zndstab/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace zndstab {

Jacobians jacobians(const StateW& s, const GasWaveConfig& config, bool reacting)
{
    const Thermo th = thermo(s, config);
    const Eigen::Index r = s.Y.size();
    const Eigen::Index n = 3 + r;
    const double rho = s.rho, u = s.u, e = s.e, G = config.Gamma;
    const double E = e + 0.5 * u * u;

    Jacobians J;
    J.A0 = Eigen::MatrixXd::Zero(n, n);
    J.A1 = Eigen::MatrixXd::Zero(n, n);
    J.C = Eigen::MatrixXd::Zero(n, n);

    J.A0(0, 0) = 1.0;
    J.A0(1, 0) = u;
    J.A0(1, 1) = rho;
    J.A0(2, 0) = E;
    J.A0(2, 1) = rho * u;
    J.A0(2, 2) = rho;

    J.A1(0, 0) = u;
    J.A1(0, 1) = rho;
    J.A1(1, 0) = u * u + G * e;
    J.A1(1, 1) = 2.0 * rho * u;
    J.A1(1, 2) = G * rho;
    J.A1(2, 0) = u * E + G * e * u;
    J.A1(2, 1) = rho * (e + 1.5 * u * u) + G * rho * e;
    J.A1(2, 2) = rho * u * (1.0 + G);

    for (Eigen::Index j = 0; j < r; ++j) {
        J.A0(3 + j, 0) = s.Y[j];
        J.A0(3 + j, 3 + j) = rho;
        J.A1(3 + j, 0) = u * s.Y[j];
        J.A1(3 + j, 1) = rho * s.Y[j];
        J.A1(3 + j, 3 + j) = rho * u;
    }

    if (reacting) {
        const double phi = ignition_factor(th.T, config);
        const double psi = rho * phi;
        const double psi_e = psi * config.EA / (config.gas_constant() * th.T * th.T * config.Cv);
        const Eigen::VectorXd KY = config.K * s.Y;
        const double qKY = config.q.dot(KY);
        J.C(2, 0) = phi * qKY;
        J.C(2, 2) = psi_e * qKY;
        J.C.block(2, 3, 1, r) = psi * (config.q.transpose() * config.K);
        J.C.block(3, 0, r, 1) = -phi * KY;
        J.C.block(3, 2, r, 1) = -psi_e * KY;
        J.C.block(3, 3, r, r) = -psi * config.K;
    }
    return J;
}

Jacobians jacobians_finite_difference(const StateW& state, const GasWaveConfig& config, double h_rel, bool reacting)
{
    const Eigen::VectorXd w = state.to_vector();
    const Eigen::Index n = w.size();
    Jacobians J;
    J.A0.resize(n, n);
    J.A1.resize(n, n);
    J.C.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double h = h_rel * std::max(1.0, std::abs(w[k]));
        Eigen::VectorXd wp = w, wm = w;
        wp[k] += h;
        wm[k] -= h;
        const Fluxes fp = fluxes(StateW::from_vector(wp), config, reacting);
        const Fluxes fm = fluxes(StateW::from_vector(wm), config, reacting);
        J.A0.col(k) = (fp.F0 - fm.F0) / (2.0 * h);
        J.A1.col(k) = (fp.F1 - fm.F1) / (2.0 * h);
        J.C.col(k) = (fp.R - fm.R) / (2.0 * h);
    }
    return J;
}

double jacobian_self_check(const StateW& state, const GasWaveConfig& config)
{
    const Jacobians a = jacobians(state, config);
    const Jacobians f = jacobians_finite_difference(state, config);
    double worst = 0.0;
    auto compare = [&](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
        const double floor = 1e-8 * std::max(x.cwiseAbs().maxCoeff(), 1e-300);
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            for (Eigen::Index j = 0; j < x.cols(); ++j)
                worst = std::max(worst, std::abs(x(i, j) - y(i, j)) / std::max(std::abs(x(i, j)), floor));
    };
    compare(a.A0, f.A0);
    compare(a.A1, f.A1);
    compare(a.C, f.C);
    return worst;
}

bool check_noncharacteristic(const StateW& state, const GasWaveConfig& config)
{
    const Thermo th = thermo(state, config);
    const double speed = std::abs(state.u) + th.c_s;
    // det(df1/dV) = rho^2 u (u^2 - c^2); g1 = rho u.
    const double det_rel = std::abs(state.u) * std::abs(state.u * state.u - th.c_s * th.c_s) / (speed * speed * speed);
    const double mass_rel = std::abs(state.u) / speed;
    return det_rel >= 1e-12 && mass_rel >= 1e-12;
}

SplitCoefficient split_coefficient(const StateW& state, const GasWaveConfig& config, bool reacting)
{
    if (!check_noncharacteristic(state, config))
        throw NearCharacteristic("profile state is sonic or stagnant (A1 singular)");
    const Jacobians J = jacobians(state, config, reacting);
    const Eigen::MatrixXd A1t = J.A1.transpose();
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A1t);
    const double rc = lu.rcond();
    if (!(rc > 1e-12))
        throw NearCharacteristic("A1 condition estimate exceeds 1e12");
    SplitCoefficient s;
    s.A0_over_A1 = lu.solve(J.A0.transpose()).transpose();
    s.C_over_A1 = lu.solve(J.C.transpose()).transpose();
    return s;
}

CMatrix coefficient_G(const StateW& state, const GasWaveConfig& config, cplx lambda, bool reacting)
{
    const SplitCoefficient s = split_coefficient(state, config, reacting);
    return -lambda * s.A0_over_A1.cast<cplx>() + s.C_over_A1.cast<cplx>();
}

CMatrix coefficient_G(const SteadyWave& wave, cplx lambda, double y)
{
    return coefficient_G(wave.profile_at(y), wave.config(), lambda, true);
}

namespace {

struct BurnedBlocks {
    Eigen::Matrix3d f0V, f1V;
    Eigen::MatrixXd f1Y; // 3 x r
    double g0, g1, psi;
    Eigen::MatrixXd QKpsi; // 3 x r
    Eigen::MatrixXd Kpsi;  // r x r
};

BurnedBlocks burned_blocks(const SteadyWave& wave)
{
    const StateW& b = wave.burned();
    const GasWaveConfig& cfg = wave.config();
    if (!check_noncharacteristic(b, cfg))
        throw NearCharacteristic("burned state is sonic or stagnant");
    const Jacobians J = jacobians(b, cfg, true);
    const Eigen::Index r = b.Y.size();
    BurnedBlocks B;
    B.f0V = J.A0.topLeftCorner<3, 3>();
    B.f1V = J.A1.topLeftCorner<3, 3>();
    B.f1Y = J.A1.topRightCorner(3, r);
    B.g0 = b.rho;
    B.g1 = b.rho * b.u;
    B.psi = b.rho * ignition_factor(b.e / cfg.Cv, cfg);
    B.QKpsi = Eigen::MatrixXd::Zero(3, r);
    B.QKpsi.row(2) = B.psi * (cfg.q.transpose() * cfg.K);
    B.Kpsi = B.psi * cfg.K;
    return B;
}

} // namespace

CMatrix limit_G_minus(const SteadyWave& wave, cplx lambda)
{
    const BurnedBlocks B = burned_blocks(wave);
    const Eigen::Index r = B.Kpsi.rows();
    Eigen::FullPivLU<Eigen::Matrix3d> lu(B.f1V.transpose());
    if (!(lu.rcond() > 1e-12))
        throw NearCharacteristic("burned-state flux Jacobian is near singular");
    const Eigen::Matrix3d f0_f1inv = lu.solve(B.f0V.transpose()).transpose();

    CMatrix G = CMatrix::Zero(3 + r, 3 + r);
    G.topLeftCorner(3, 3) = -lambda * f0_f1inv.cast<cplx>();
    G.topRightCorner(3, r) = (lambda * (f0_f1inv * B.f1Y).cast<cplx>() + B.QKpsi.cast<cplx>()) / B.g1;
    const CMatrix eye = CMatrix::Identity(r, r);
    G.bottomRightCorner(r, r) = -(lambda * B.g0 * eye + B.Kpsi.cast<cplx>()) / B.g1;
    return G;
}

CMatrix limit_G_plus(const SteadyWave& wave, cplx lambda)
{
    return coefficient_G(wave.upstream(), wave.config(), lambda, false);
}

LeftMode stable_left_mode(const SteadyWave& wave, cplx lambda)
{
    if (lambda == cplx(0.0, 0.0))
        throw DomainError("stable_left_mode: lambda = 0 is excluded (neutral mode)");
    if (lambda.real() < 0.0)
        throw DomainError("stable_left_mode: requires Re lambda >= 0");

    const StateW& b = wave.burned();
    const GasWaveConfig& cfg = wave.config();
    const Thermo th = thermo(b, cfg);
    if (!(std::abs(b.u) < th.c_s))
        throw DomainError("stable_left_mode: burned state must be subsonic");
    const BurnedBlocks B = burned_blocks(wave);
    const Eigen::Index r = B.Kpsi.rows();

    const double rho = b.rho, u = b.u, e = b.e, c = th.c_s;
    Eigen::Vector3d lV;
    lV << (rho / th.p_e) * (th.p_rho - c * u) + 0.5 * u * u - e, (rho / th.p_e) * c - u, 1.0;
    const double alpha = 1.0 / (u + c);

    Eigen::FullPivLU<Eigen::Matrix3d> lu(B.f1V.transpose());
    const Eigen::Matrix3d f0_f1inv = lu.solve(B.f0V.transpose()).transpose();
    // l_Y^T = l_V^T (lambda f0 f1^{-1} f1_Y + Q K psi) (lambda (g0 - alpha g1) + K psi)^{-1}
    const CMatrix coupling = lambda * (f0_f1inv * B.f1Y).cast<cplx>() + B.QKpsi.cast<cplx>();
    const CMatrix resolvent =
        lambda * (B.g0 - alpha * B.g1) * CMatrix::Identity(r, r) + B.Kpsi.cast<cplx>();
    Eigen::PartialPivLU<CMatrix> rlu(resolvent.transpose());
    const double scale = std::abs(lambda) * std::abs(B.g0 - alpha * B.g1) + B.Kpsi.norm();
    if (!(rlu.rcond() > 1e-13) || !(std::abs(resolvent.determinant()) > 1e-14 * std::pow(scale, double(r))))
        throw ResonantResolvent(lambda);
    LeftMode mode;
    mode.ell.resize(3 + r);
    mode.ell.head(3) = lV.cast<cplx>();
    mode.ell.tail(r) = rlu.solve((coupling.transpose() * lV.cast<cplx>()).eval());
    mode.g_minus = -lambda * alpha;
    return mode;
}

double left_residual(const CMatrix& G, const CVector& ell, cplx g)
{
    return (G.transpose() * ell - g * ell).norm() / ell.norm();
}

namespace {

struct Eigenpick {
    cplx value;
    CMatrix projector; // acts on left eigenvectors: P = v w^T / (w^T v) for G^T
    double gap;
};

Eigenpick pick_eigen(const CMatrix& G, cplx target)
{
    const CMatrix Gt = G.transpose();
    Eigen::ComplexEigenSolver<CMatrix> es(Gt);
    const CVector vals = es.eigenvalues();
    const CMatrix V = es.eigenvectors();
    Eigen::Index k = 0;
    for (Eigen::Index i = 1; i < vals.size(); ++i)
        if (std::abs(vals[i] - target) < std::abs(vals[k] - target))
            k = i;
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < vals.size(); ++i)
        if (i != k)
            gap = std::min(gap, std::abs(vals[i] - vals[k]));
    const CMatrix W = V.inverse();
    Eigenpick p;
    p.value = vals[k];
    p.projector = V.col(k) * W.row(k);
    p.gap = gap;
    return p;
}

} // namespace

std::vector<CVector> kato_continuation(const SteadyWave& wave, std::span<const cplx> path, const KatoOptions& options)
{
    std::vector<CVector> out;
    if (path.empty())
        return out;
    const LeftMode start = stable_left_mode(wave, path[0]);
    out.push_back(start.ell);
    CVector ell = start.ell;
    cplx g = start.g_minus;

    auto check = [&](const Eigenpick& p, cplx lambda) {
        if (p.gap < 1e-8 * std::max(1.0, std::abs(p.value)))
            throw BranchAmbiguity(lambda);
        if (!((p.value / lambda).real() < 0.0))
            throw BranchAmbiguity(lambda);
    };

    const int n = std::max(1, options.substeps);
    for (std::size_t seg = 1; seg < path.size(); ++seg) {
        const cplx a = path[seg - 1];
        const cplx d = path[seg] - a;
        if (d == cplx(0.0, 0.0)) {
            out.push_back(ell);
            continue;
        }
        // The gas eigenvalues of G_- all scale with lambda, so their separation
        // shrinks near the origin; keep each step small relative to |lambda|.
        const double len = std::abs(d);
        double delta = 0.0;
        // dP/dt along lambda(t) = a + t d, t in [0, 1].
        auto dP = [&](double t, cplx track) {
            const Eigenpick p1 = pick_eigen(limit_G_minus(wave, a + (t + delta) * d), track);
            const Eigenpick p0 = pick_eigen(limit_G_minus(wave, a + (t - delta) * d), track);
            return CMatrix((p1.projector - p0.projector) / (2.0 * delta));
        };
        double t = 0.0;
        while (t < 1.0) {
            const double local = std::abs(a + t * d);
            if (!(local > 0.0))
                throw BranchAmbiguity(a + t * d);
            double dt = std::min(1.0 / n, 0.05 * local / len);
            if (t + dt > 1.0 - 1e-12)
                dt = 1.0 - t;
            delta = 1e-3 * dt;
            const CVector k1 = dP(t, g) * ell;
            const CVector k2 = dP(t + 0.5 * dt, g) * (ell + 0.5 * dt * k1);
            const CVector k3 = dP(t + 0.5 * dt, g) * (ell + 0.5 * dt * k2);
            const CVector k4 = dP(t + dt, g) * (ell + dt * k3);
            ell += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t = dt == 1.0 - t ? 1.0 : t + dt;
            const cplx lambda = a + t * d;
            const Eigenpick p = pick_eigen(limit_G_minus(wave, lambda), g);
            check(p, lambda);
            g = p.value;
            ell = p.projector * ell;
        }
        out.push_back(ell);
    }
    return out;
}

CVector jump_vector(const SteadyWave& wave, cplx lambda)
{
    const Fluxes up = fluxes(wave.upstream(), wave.config(), false);
    const Fluxes nm = fluxes(wave.neumann(), wave.config(), true);
    return lambda * (up.F0 - nm.F0).cast<cplx>() + nm.R.cast<cplx>();
}

SpectralFrame SpectralFrame::make(const SteadyWave& wave, cplx lambda)
{
    SpectralFrame f;
    f.wave = &wave;
    f.lambda = lambda;
    const LeftMode mode = stable_left_mode(wave, lambda);
    f.ell = mode.ell;
    f.g_minus = mode.g_minus;
    f.jump = jump_vector(wave, lambda);
    return f;
}

} // namespace zndstab
