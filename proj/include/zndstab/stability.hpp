#pragma once

// Unstable-mode counting by the argument principle and root following under
// parameter sweeps.

#include "zndstab/evans.hpp"
#include "zndstab/numerics.hpp"
#include "zndstab/znd.hpp"

#include <functional>
#include <string>
#include <vector>

namespace zndstab {

struct WindingReport {
    Contour contour;
    ContourSamples samples;
    std::size_t n_samples = 0;
    int winding = 0;
    double min_abs_D = 0.0;
    std::string method;
};

struct CountOptions {
    std::size_t initial_nodes = 32;
    double max_phase_step = 0.7853981633974483; // pi/4
    double axis_offset_fraction = 1e-4;         // flat side at Re = fraction * radius
    double floor_relative = 1e-10;              // |D| floor relative to max |D| on the contour
    RefineOptions refine;
};

// Winding of an arbitrary evaluator around the right half-disc of `radius`.
WindingReport count_unstable(const ComplexMap& evaluator, double radius, const CountOptions& options = {},
                             const std::string& label = "custom");

WindingReport count_unstable(const SteadyWave& wave, double radius, Method method, const EvansOptions& evans = {},
                             const CountOptions& options = {});

struct RootTrace {
    std::string parameter;
    std::vector<double> values;
    std::vector<cplx> roots;
    std::vector<bool> converged;
    bool complete = true;
    double last_good = 0.0;
    std::string message;
};

struct SweepOptions {
    double newton_tol = 1e-10;
    int max_iter = 30;
    double min_step_fraction = 1.0 / 64.0; // smallest parameter step relative to the requested one
    double max_jump = 0.5;                 // largest allowed root move per accepted step
};

// family(p) returns the determinant at parameter p. The first root is found by
// Newton from `seed` at values.front(); later roots continue from the previous.
RootTrace sweep_roots(const std::function<ComplexMap(double)>& family, const std::string& parameter,
                      const std::vector<double>& values, cplx seed, const SweepOptions& options = {});

// Sets one named scalar parameter (Gamma, Cv, q, EA, K, Y0, upstream.rho,
// upstream.u, upstream.e) of a config; throws ConfigError for unknown names.
void set_parameter(GasWaveConfig& config, const std::string& name, double value);

RootTrace sweep_znd_roots(const GasWaveConfig& base, const std::string& parameter, const std::vector<double>& values,
                          cplx seed, Method method, const EvansOptions& evans = {}, const SweepOptions& options = {});

} // namespace zndstab
