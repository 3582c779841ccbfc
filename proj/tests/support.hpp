#pragma once

// Shared fixtures for the test executables.

#include "zndstab/errors.hpp"
#include "zndstab/io.hpp"
#include "zndstab/znd.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace zndstab::testing {

inline std::string config_path(const std::string& name)
{
    return std::string(ZNDSTAB_CONFIG_DIR) + "/" + name;
}

inline GasWaveConfig shipped(const std::string& name)
{
    return load_config(config_path(name + ".json"));
}

// Overdriven single-reaction waves with random gas and reaction constants.
// The ignition window is pinned at the upstream temperature so that only the
// overdrive condition can reject a draw.
inline std::vector<GasWaveConfig> random_overdriven(std::size_t n, unsigned seed)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> gamma(0.15, 0.5), heat(5.0, 60.0), energy(1.0, 5.0), rate(1.0, 50.0),
        activation(5.0, 80.0), overdrive(1.2, 3.0), density(0.5, 2.0);
    std::vector<GasWaveConfig> out;
    while (out.size() < n) {
        const double G = gamma(rng);
        const double e = energy(rng);
        const double q = heat(rng);
        const double c_plus = std::sqrt(G * (G + 1.0) * e);
        // CJ speed grows like sqrt(q); scale the draw so most attempts are overdriven.
        const double u = -overdrive(rng) * (c_plus + std::sqrt(2.0 * (G + 1.0) * (G + 2.0) * G * q) / (G + 1.0));
        GasWaveConfig c = GasWaveConfig::single(G, 1.0, q, activation(rng), e, e, rate(rng), 1.0,
                                                UpstreamState{density(rng), u, e});
        try {
            build_wave(c);
        } catch (const Error&) {
            continue;
        }
        out.push_back(c);
    }
    return out;
}

inline double rel(cplx a, cplx b)
{
    return std::abs(a - b) / std::abs(b);
}

} // namespace zndstab::testing
