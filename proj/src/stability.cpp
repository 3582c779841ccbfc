#include "zndstab/stability.hpp"
#include "zndstab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace zndstab {

WindingReport count_unstable(const ComplexMap& evaluator, double radius, const CountOptions& options,
                             const std::string& label)
{
    if (!(radius > 0.0))
        throw DomainError("count_unstable: radius must be positive");
    WindingReport rep{Contour::semicircle(radius, options.axis_offset_fraction * radius, options.initial_nodes), {}, 0,
                      0, 0.0, label};
    rep.samples = refine_contour(evaluator, rep.contour, options.max_phase_step, options.refine);
    rep.n_samples = rep.samples.size();

    double max_abs = 0.0;
    rep.min_abs_D = std::numeric_limits<double>::infinity();
    std::size_t at = 0;
    for (std::size_t i = 0; i < rep.samples.size(); ++i) {
        const double a = std::abs(rep.samples.values[i]);
        max_abs = std::max(max_abs, a);
        if (a < rep.min_abs_D) {
            rep.min_abs_D = a;
            at = i;
        }
    }
    if (rep.min_abs_D <= options.floor_relative * max_abs)
        throw ContourThroughRoot("|D| nearly vanishes on the contour", rep.samples.nodes[at]);

    std::span<const cplx> values(rep.samples.values.data(), rep.samples.values.size() - 1);
    rep.winding = winding_number(values);
    return rep;
}

WindingReport count_unstable(const SteadyWave& wave, double radius, Method method, const EvansOptions& evans,
                             const CountOptions& options)
{
    return count_unstable(evans_map(wave, method, evans), radius, options, to_string(method));
}

RootTrace sweep_roots(const std::function<ComplexMap(double)>& family, const std::string& parameter,
                      const std::vector<double>& values, cplx seed, const SweepOptions& options)
{
    RootTrace trace;
    trace.parameter = parameter;
    if (values.empty())
        return trace;

    auto solve = [&](double p, cplx guess) { return newton_root(family(p), guess, options.newton_tol, options.max_iter); };

    cplx root;
    try {
        root = solve(values.front(), seed).root;
    } catch (const Error& e) {
        trace.complete = false;
        trace.last_good = values.front();
        trace.message = std::string("no root near the seed at the first value: ") + e.what();
        return trace;
    }
    trace.values.push_back(values.front());
    trace.roots.push_back(root);
    trace.converged.push_back(true);
    trace.last_good = values.front();

    double p = values.front();
    for (std::size_t i = 1; i < values.size(); ++i) {
        const double target = values[i];
        const double full = target - p;
        double step = full;
        while (p != target) {
            if (std::abs(target - p) < std::abs(step))
                step = target - p;
            std::string failure;
            cplx next;
            try {
                next = solve(p + step, root).root;
                if (std::abs(next - root) > options.max_jump)
                    failure = "root moved farther than the continuation bound";
                else if (next.real() < 0.0)
                    failure = "root left the closed right half-plane";
            } catch (const Error& e) {
                failure = e.what();
            }
            if (failure.empty()) {
                p = (std::abs(target - (p + step)) <= 1e-15 * std::max(1.0, std::abs(target))) ? target : p + step;
                root = next;
                trace.last_good = p;
                continue;
            }
            step *= 0.5;
            if (std::abs(step) < options.min_step_fraction * std::abs(full)) {
                trace.complete = false;
                trace.message = "continuation broke down after " + parameter + " = " + std::to_string(p) + ": " +
                                failure;
                return trace;
            }
        }
        trace.values.push_back(target);
        trace.roots.push_back(root);
        trace.converged.push_back(true);
    }
    return trace;
}

void set_parameter(GasWaveConfig& c, const std::string& name, double value)
{
    if (name == "Gamma")
        c.Gamma = value;
    else if (name == "Cv")
        c.Cv = value;
    else if (name == "q")
        c.q.setConstant(value);
    else if (name == "EA")
        c.EA = value;
    else if (name == "K")
        c.K.setConstant(value);
    else if (name == "Y0")
        c.Y0.setConstant(value);
    else if (name == "Ti_low")
        c.Ti_low = value;
    else if (name == "Ti_high")
        c.Ti_high = value;
    else if (name == "upstream.rho")
        c.upstream.rho = value;
    else if (name == "upstream.u")
        c.upstream.u = value;
    else if (name == "upstream.e")
        c.upstream.e = value;
    else
        throw ConfigError(name, "not a sweepable parameter");
}

RootTrace sweep_znd_roots(const GasWaveConfig& base, const std::string& parameter, const std::vector<double>& values,
                          cplx seed, Method method, const EvansOptions& evans, const SweepOptions& options)
{
    if (!values.empty()) {
        GasWaveConfig probe = base;
        set_parameter(probe, parameter, values.front());
    }
    auto family = [&](double p) -> ComplexMap {
        GasWaveConfig cfg = base;
        set_parameter(cfg, parameter, p);
        auto wave = std::make_shared<const SteadyWave>(build_wave(cfg));
        return [wave, method, evans](cplx lambda) { return evaluate_evans(*wave, lambda, method, evans).canonical(); };
    };
    return sweep_roots(family, parameter, values, seed, options);
}

} // namespace zndstab
