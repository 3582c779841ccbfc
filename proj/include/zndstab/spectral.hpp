#pragma once

// Linearization of the reactive Euler system about the steady profile:
// Jacobians, the coefficient matrix G(lambda, y), its limits, the stable left
// eigenmode at the burned end and the shock jump vector.

#include "zndstab/numerics.hpp"
#include "zndstab/znd.hpp"

#include <span>
#include <vector>

namespace zndstab {

struct Jacobians {
    Eigen::MatrixXd A0; // dF0/dW
    Eigen::MatrixXd A1; // dF1/dW
    Eigen::MatrixXd C;  // dR/dW
};

Jacobians jacobians(const StateW& state, const GasWaveConfig& config, bool reacting = true);

// Central differences of `fluxes`, relative step h_rel.
Jacobians jacobians_finite_difference(const StateW& state, const GasWaveConfig& config, double h_rel = 1e-6,
                                      bool reacting = true);

// Largest entry error |analytic - fd| / max(|analytic|, floor) over A0, A1, C,
// where floor is 1e-8 times the largest entry of the matrix.
double jacobian_self_check(const StateW& state, const GasWaveConfig& config);

// False at sonic (|u| = c) or stagnation (u = 0) states.
bool check_noncharacteristic(const StateW& state, const GasWaveConfig& config);

// A0 A1^{-1} and C A1^{-1}, so that G = -lambda * first + second.
struct SplitCoefficient {
    Eigen::MatrixXd A0_over_A1;
    Eigen::MatrixXd C_over_A1;
};

// Throws NearCharacteristic when the condition estimate of A1 exceeds 1e12.
SplitCoefficient split_coefficient(const StateW& state, const GasWaveConfig& config, bool reacting = true);

CMatrix coefficient_G(const SteadyWave& wave, cplx lambda, double y);
CMatrix coefficient_G(const StateW& state, const GasWaveConfig& config, cplx lambda, bool reacting = true);

// Block upper-triangular limit at the burned state.
CMatrix limit_G_minus(const SteadyWave& wave, cplx lambda);
// Constant coefficient matrix ahead of the shock (no reaction).
CMatrix limit_G_plus(const SteadyWave& wave, cplx lambda);

struct LeftMode {
    CVector ell;   // energy component equals 1
    cplx g_minus;  // -lambda / (u_- + c_-)
};

// Throws DomainError for lambda = 0 or Re lambda < 0, and ResonantResolvent
// when the reaction resolvent is singular.
LeftMode stable_left_mode(const SteadyWave& wave, cplx lambda);

// ||ell^T G - g ell^T|| / ||ell||
double left_residual(const CMatrix& G, const CVector& ell, cplx g);

struct KatoOptions {
    int substeps = 64; // minimum RK4 steps per path segment; more near lambda = 0
};

// Transports the stable left eigenvector along a polygonal lambda path by
// Kato's ODE, starting from the closed form at path[0]. Throws
// BranchAmbiguity if the tracked eigenvalue meets another one.
std::vector<CVector> kato_continuation(const SteadyWave& wave, std::span<const cplx> path,
                                       const KatoOptions& options = {});

// lambda [F0] + R(W(0-)), with [F0] = F0(upstream) - F0(Neumann).
CVector jump_vector(const SteadyWave& wave, cplx lambda);

struct SpectralFrame {
    const SteadyWave* wave = nullptr;
    cplx lambda;
    CVector ell;
    cplx g_minus;
    CVector jump;

    static SpectralFrame make(const SteadyWave& wave, cplx lambda);
    CMatrix G(double y) const { return coefficient_G(*wave, lambda, y); }
};

} // namespace zndstab
