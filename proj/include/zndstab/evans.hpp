#pragma once

// Evans-Lopatinski determinant D(lambda) of a steady ZND wave by three
// shooting algorithms, all integrated in the reaction coordinate y.
//
//   neutral      adjoint from -M to 0 with the decay rate g_- factored out
//   erpenbeck    unfactored adjoint plus a quadrature carried in the state
//   lee_stewart  forward solution from the shock back to -M
//
// Each method returns its raw value D together with a scalar kappa such that
// kappa * D is the same analytic function for all three (canonical()).

#include "zndstab/numerics.hpp"
#include "zndstab/spectral.hpp"
#include "zndstab/znd.hpp"

#include <optional>
#include <string>

namespace zndstab {

enum class Method { neutral, erpenbeck, lee_stewart };

std::string to_string(Method m);
// Accepts "neutral", "erpenbeck", "lee_stewart" and "lee-stewart".
std::optional<Method> parse_method(const std::string& name);

struct EvansOptions {
    double M = 0.0;      // truncation in y; <= 0 selects SteadyWave::default_M()
    double tol = 1e-5;   // relative and absolute tolerance
    StepControl control = StepControl::ode45;
    double max_growth = 1e6; // neutral: largest |Z(0)| / |Z(-M)| before flagging a bad mode
};

struct EvansResult {
    cplx lambda;
    cplx D;
    Method method = Method::neutral;
    double M = 0.0;
    double x_M = 0.0; // -x(-M), only computed by the unfactored methods
    cplx kappa{1.0, 0.0};
    double growth = 1.0; // |Z(end)| / |Z(start)|
    SolveStats stats;

    cplx canonical() const { return kappa * D; }
};

EvansResult evans_neutral(const SteadyWave& wave, cplx lambda, const EvansOptions& options = {});
// Throws Overflow when the unfactored adjoint leaves double range.
EvansResult evans_erpenbeck(const SteadyWave& wave, cplx lambda, const EvansOptions& options = {});
EvansResult evans_lee_stewart(const SteadyWave& wave, cplx lambda, const EvansOptions& options = {});

EvansResult evaluate_evans(const SteadyWave& wave, cplx lambda, Method method, const EvansOptions& options = {});

// Canonical D as a plain map, for contour and Newton drivers.
ComplexMap evans_map(const SteadyWave& wave, Method method, const EvansOptions& options = {});

struct DualityReport {
    double max_deviation = 0.0;
    cplx median;
    std::vector<double> y;
    std::vector<cplx> products;
};

// Integrates the unfactored adjoint and the forward solution on a shared grid
// of n_grid points in [-M, 0] and reports the spread of their pairing.
DualityReport duality_check(const SteadyWave& wave, cplx lambda, double M, std::size_t n_grid, double tol);

} // namespace zndstab
