#include "zndstab/evans.hpp"
#include "zndstab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace zndstab {

std::string to_string(Method m)
{
    switch (m) {
    case Method::neutral:
        return "neutral";
    case Method::erpenbeck:
        return "erpenbeck";
    case Method::lee_stewart:
        return "lee_stewart";
    }
    return "unknown";
}

std::optional<Method> parse_method(const std::string& name)
{
    if (name == "neutral")
        return Method::neutral;
    if (name == "erpenbeck")
        return Method::erpenbeck;
    if (name == "lee_stewart" || name == "lee-stewart")
        return Method::lee_stewart;
    return std::nullopt;
}

namespace {

struct ProfilePoint {
    Eigen::MatrixXd P0; // A0 A1^{-1}
    Eigen::MatrixXd P1; // C A1^{-1}
    double scale;       // dx/dy
    StateW state;
};

ProfilePoint profile_point(const SteadyWave& wave, double y)
{
    ProfilePoint p;
    p.state = wave.profile_at(y);
    const SplitCoefficient s = split_coefficient(p.state, wave.config(), true);
    p.P0 = s.A0_over_A1;
    p.P1 = s.C_over_A1;
    p.scale = wave.m() / (p.state.rho * ignition_factor(p.state.e / wave.config().Cv, wave.config()));
    return p;
}

// z' = -s(y) (G - shift I)^H z on the first n components.
CVector adjoint_rhs(const ProfilePoint& p, cplx lambda, cplx shift, const CVector& z)
{
    const Eigen::Index n = p.P0.rows();
    const CVector head = z.head(n);
    CVector out = -std::conj(lambda) * (p.P0.transpose().cast<cplx>() * head) +
                  p.P1.transpose().cast<cplx>() * head - std::conj(shift) * head;
    return -p.scale * out;
}

double resolve_M(const SteadyWave& wave, const EvansOptions& options)
{
    const double M = options.M > 0.0 ? options.M : wave.default_M();
    if (!(M > 0.0) || !std::isfinite(M))
        throw DomainError("truncation length M must be positive");
    return M;
}

IntegratorOptions integrator_options(const EvansOptions& options)
{
    if (!(options.tol > 0.0))
        throw DomainError("tolerance must be positive");
    IntegratorOptions o;
    o.rel_tol = options.tol;
    o.abs_tol = options.tol;
    o.control = options.control;
    return o;
}

void check_lambda(cplx lambda)
{
    if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()))
        throw DomainError("lambda must be finite");
}

} // namespace

EvansResult evans_neutral(const SteadyWave& wave, cplx lambda, const EvansOptions& options)
{
    check_lambda(lambda);
    const SpectralFrame frame = SpectralFrame::make(wave, lambda);
    const double M = resolve_M(wave, options);
    const std::size_t n = static_cast<std::size_t>(frame.ell.size());

    OdeField field;
    field.dimension = n;
    field.eval = [&](double y, const CVector& z) {
        return adjoint_rhs(profile_point(wave, y), lambda, frame.g_minus, z);
    };
    const CVector init = frame.ell.conjugate();
    const Solution sol = integrate_adaptive(field, -M, 0.0, init, integrator_options(options));

    EvansResult r;
    r.lambda = lambda;
    r.method = Method::neutral;
    r.M = M;
    r.stats = sol.stats;
    r.D = sol.state.dot(frame.jump); // conj(Z) . jump
    r.growth = sol.state.norm() / init.norm();
    // Decay is legitimate (attenuation across the reaction zone grows with
    // Re lambda); only runaway growth points at a wrongly factored mode.
    if (r.growth > options.max_growth)
        throw DomainError("neutral adjoint grew by " + std::to_string(r.growth) +
                          "; the decay rate g_- does not match the tracked mode");
    return r;
}

EvansResult evans_erpenbeck(const SteadyWave& wave, cplx lambda, const EvansOptions& options)
{
    check_lambda(lambda);
    const SpectralFrame frame = SpectralFrame::make(wave, lambda);
    const double M = resolve_M(wave, options);
    const Eigen::Index n = frame.ell.size();

    OdeField field;
    field.dimension = static_cast<std::size_t>(n + 1);
    field.eval = [&](double y, const CVector& z) {
        const ProfilePoint p = profile_point(wave, y);
        CVector out(n + 1);
        out.head(n) = adjoint_rhs(p, lambda, 0.0, z);
        const Jacobians J = jacobians(p.state, wave.config(), true);
        const Eigen::VectorXd forcing = J.A0 * wave.profile_derivative(y);
        out[n] = z.head(n).dot(lambda * forcing.cast<cplx>());
        return out;
    };
    CVector init = CVector::Zero(n + 1);
    init.head(n) = frame.ell.conjugate();

    Solution sol;
    try {
        sol = integrate_adaptive(field, -M, 0.0, init, integrator_options(options));
    } catch (const NonFiniteState& e) {
        throw Overflow(std::string("Erpenbeck adjoint overflowed (") + e.what() +
                       "); use the neutral method for this lambda");
    }
    const Fluxes up = fluxes(wave.upstream(), wave.config(), false);
    const Fluxes nm = fluxes(wave.neumann(), wave.config(), true);
    const CVector jump0 = lambda * (up.F0 - nm.F0).cast<cplx>();

    EvansResult r;
    r.lambda = lambda;
    r.method = Method::erpenbeck;
    r.M = M;
    r.stats = sol.stats;
    r.D = sol.state[n] + sol.state.head(n).dot(jump0);
    r.x_M = -wave.x_at(-M);
    r.kappa = std::exp(frame.g_minus * r.x_M);
    r.growth = sol.state.head(n).norm() / frame.ell.norm();
    if (!std::isfinite(std::abs(r.D)))
        throw Overflow("Erpenbeck value is not finite; use the neutral method for this lambda");
    return r;
}

EvansResult evans_lee_stewart(const SteadyWave& wave, cplx lambda, const EvansOptions& options)
{
    check_lambda(lambda);
    const SpectralFrame frame = SpectralFrame::make(wave, lambda);
    const double M = resolve_M(wave, options);
    const std::size_t n = static_cast<std::size_t>(frame.ell.size());

    OdeField field;
    field.dimension = n;
    field.eval = [&](double y, const CVector& z) {
        const ProfilePoint p = profile_point(wave, y);
        return CVector(p.scale * (-lambda * (p.P0.cast<cplx>() * z) + p.P1.cast<cplx>() * z));
    };
    Solution sol;
    try {
        sol = integrate_adaptive(field, 0.0, -M, frame.jump, integrator_options(options));
    } catch (const NonFiniteState& e) {
        throw Overflow(std::string("Lee-Stewart solution overflowed (") + e.what() + ")");
    }

    EvansResult r;
    r.lambda = lambda;
    r.method = Method::lee_stewart;
    r.M = M;
    r.stats = sol.stats;
    r.D = (frame.ell.transpose() * sol.state)(0, 0);
    r.x_M = -wave.x_at(-M);
    r.kappa = std::exp(frame.g_minus * r.x_M);
    r.growth = sol.state.norm() / frame.jump.norm();
    return r;
}

EvansResult evaluate_evans(const SteadyWave& wave, cplx lambda, Method method, const EvansOptions& options)
{
    switch (method) {
    case Method::neutral:
        return evans_neutral(wave, lambda, options);
    case Method::erpenbeck:
        return evans_erpenbeck(wave, lambda, options);
    case Method::lee_stewart:
        return evans_lee_stewart(wave, lambda, options);
    }
    throw DomainError("unknown method");
}

ComplexMap evans_map(const SteadyWave& wave, Method method, const EvansOptions& options)
{
    return [&wave, method, options](cplx lambda) { return evaluate_evans(wave, lambda, method, options).canonical(); };
}

DualityReport duality_check(const SteadyWave& wave, cplx lambda, double M, std::size_t n_grid, double tol)
{
    if (n_grid < 2)
        throw DomainError("duality_check needs at least two grid points");
    if (!(lambda.real() > 0.0))
        throw DomainError("duality_check requires Re lambda > 0");
    const SpectralFrame frame = SpectralFrame::make(wave, lambda);
    if (!(M > 0.0))
        M = wave.default_M();
    const Eigen::Index n = frame.ell.size();

    std::vector<double> up(n_grid), down(n_grid);
    for (std::size_t i = 0; i < n_grid; ++i) {
        up[i] = -M + M * static_cast<double>(i) / static_cast<double>(n_grid - 1);
        down[n_grid - 1 - i] = up[i];
    }
    up.back() = 0.0;
    down.front() = 0.0;

    EvansOptions eo;
    eo.tol = tol;
    IntegratorOptions io = integrator_options(eo);
    // Step cap relative to the whole span, not to each grid segment, so the
    // grid only samples the solution and does not refine it.
    io.max_step_fraction *= static_cast<double>(n_grid - 1);

    OdeField adjoint;
    adjoint.dimension = static_cast<std::size_t>(n);
    adjoint.eval = [&](double y, const CVector& z) { return adjoint_rhs(profile_point(wave, y), lambda, 0.0, z); };
    OdeField forward;
    forward.dimension = static_cast<std::size_t>(n);
    forward.eval = [&](double y, const CVector& z) {
        const ProfilePoint p = profile_point(wave, y);
        return CVector(p.scale * (-lambda * (p.P0.cast<cplx>() * z) + p.P1.cast<cplx>() * z));
    };
    const auto Zt = integrate_through(adjoint, up, frame.ell.conjugate(), io);
    const auto Z0 = integrate_through(forward, down, frame.jump, io);

    DualityReport rep;
    rep.y = up;
    rep.products.resize(n_grid);
    for (std::size_t i = 0; i < n_grid; ++i)
        rep.products[i] = Zt[i].dot(Z0[n_grid - 1 - i]);

    std::vector<double> re(n_grid), im(n_grid);
    for (std::size_t i = 0; i < n_grid; ++i) {
        re[i] = rep.products[i].real();
        im[i] = rep.products[i].imag();
    }
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const std::size_t k = v.size() / 2;
        return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
    };
    rep.median = cplx(median(re), median(im));
    for (const cplx& p : rep.products)
        rep.max_deviation = std::max(rep.max_deviation, std::abs(p - rep.median) / std::abs(rep.median));
    return rep;
}

} // namespace zndstab
