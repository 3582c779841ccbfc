#include "zndstab/znd.hpp"
#include "zndstab/errors.hpp"
#include "zndstab/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace zndstab {

GasWaveConfig GasWaveConfig::single(double Gamma, double Cv, double q, double EA, double Ti_low, double Ti_high,
                                    double K, double Y0, UpstreamState upstream)
{
    GasWaveConfig c;
    c.Gamma = Gamma;
    c.Cv = Cv;
    c.q = Eigen::VectorXd::Constant(1, q);
    c.EA = EA;
    c.Ti_low = Ti_low;
    c.Ti_high = Ti_high;
    c.K = Eigen::MatrixXd::Constant(1, 1, K);
    c.Y0 = Eigen::VectorXd::Constant(1, Y0);
    c.upstream = upstream;
    return c;
}

void GasWaveConfig::validate() const
{
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(Gamma) || Gamma <= 0.0)
        throw ConfigError("Gamma", "must be positive");
    if (!finite(Cv) || Cv <= 0.0)
        throw ConfigError("Cv", "must be positive");
    if (!finite(EA) || EA < 0.0)
        throw ConfigError("EA", "must be non-negative");
    if (!finite(Ti_low) || Ti_low <= 0.0)
        throw ConfigError("Ti_low", "must be positive");
    if (!finite(Ti_high) || Ti_high < Ti_low)
        throw ConfigError("Ti_high", "must be at least Ti_low");
    const auto r = Y0.size();
    if (r < 1)
        throw ConfigError("Y0", "needs at least one species");
    for (Eigen::Index i = 0; i < r; ++i)
        if (!finite(Y0[i]) || Y0[i] < 0.0 || Y0[i] > 1.0)
            throw ConfigError("Y0", "mass fractions must lie in [0, 1]");
    if (q.size() != r)
        throw ConfigError("q", "length must match Y0");
    for (Eigen::Index i = 0; i < r; ++i)
        if (!finite(q[i]))
            throw ConfigError("q", "must be finite");
    if (K.rows() != r || K.cols() != r)
        throw ConfigError("K", "must be an r x r matrix matching Y0");
    if (!K.allFinite())
        throw ConfigError("K", "must be finite");
    Eigen::VectorXcd spectrum = K.eigenvalues();
    for (Eigen::Index i = 0; i < spectrum.size(); ++i)
        if (spectrum[i].real() <= 0.0)
            throw ConfigError("K", "spectrum must lie in the open right half-plane");
    if (!finite(upstream.rho) || upstream.rho <= 0.0)
        throw ConfigError("upstream.rho", "must be positive");
    if (!finite(upstream.e) || upstream.e <= 0.0)
        throw ConfigError("upstream.e", "must be positive");
    if (!finite(upstream.u) || upstream.u >= 0.0)
        throw ConfigError("upstream.u", "must be negative (right-moving wave in the steady frame)");
    if (!finite(tol) || tol <= 0.0)
        throw ConfigError("tol", "must be positive");
    if (!finite(eps_Y) || eps_Y <= 0.0 || eps_Y >= 1.0)
        throw ConfigError("eps_Y", "must lie in (0, 1)");
}

Eigen::VectorXd StateW::to_vector() const
{
    Eigen::VectorXd w(3 + Y.size());
    w << rho, u, e, Y;
    return w;
}

StateW StateW::from_vector(const Eigen::VectorXd& w)
{
    StateW s;
    s.rho = w[0];
    s.u = w[1];
    s.e = w[2];
    s.Y = w.tail(w.size() - 3);
    return s;
}

Thermo thermo(const StateW& state, const GasWaveConfig& config)
{
    if (!(state.rho > 0.0))
        throw DomainError("density must be positive");
    if (!(state.e > 0.0))
        throw DomainError("internal energy must be positive");
    const double G = config.Gamma;
    Thermo t{};
    t.p = G * state.rho * state.e;
    t.T = state.e / config.Cv;
    t.p_rho = G * state.e;
    t.p_e = G * state.rho;
    t.c_s = std::sqrt(G * (G + 1.0) * state.e);
    return t;
}

double ignition_factor(double T, const GasWaveConfig& config)
{
    return std::exp(-config.EA / (config.gas_constant() * T));
}

Fluxes fluxes(const StateW& s, const GasWaveConfig& config, bool reacting)
{
    const Thermo th = thermo(s, config);
    const auto r = s.Y.size();
    const double E = s.e + 0.5 * s.u * s.u;
    Fluxes f;
    f.F0.resize(3 + r);
    f.F1.resize(3 + r);
    f.R = Eigen::VectorXd::Zero(3 + r);
    f.F0 << s.rho, s.rho * s.u, s.rho * E, s.rho * s.Y;
    f.F1 << s.rho * s.u, s.rho * s.u * s.u + th.p, (s.rho * E + th.p) * s.u, s.rho * s.u * s.Y;
    if (reacting) {
        const double psi = s.rho * ignition_factor(th.T, config);
        Eigen::VectorXd rates = psi * (config.K * s.Y);
        f.R[2] = config.q.dot(rates);
        f.R.tail(r) = -rates;
    }
    return f;
}

Eigen::Vector3d euler_flux(double rho, double u, double e, double Gamma)
{
    const double p = Gamma * rho * e;
    return {rho * u, rho * u * u + p, (rho * (e + 0.5 * u * u) + p) * u};
}

// ---------------------------------------------------------------------------

double SteadyWave::discriminant(double Ybar) const
{
    const double G = config_.Gamma;
    return k_ * k_ * b_ * b_ + 2.0 * G * (config_.q[0] * Ybar - c_) / (G + 2.0);
}

StateW SteadyWave::state_at(double Ybar) const
{
    const double disc = discriminant(Ybar);
    if (!(disc > 0.0))
        throw ChapmanJouguetOrSonic(disc);
    StateW s;
    s.u = k_ * b_ + sigma_ * std::sqrt(disc);
    s.rho = -m_ / s.u;
    s.e = (b_ * s.u - s.u * s.u) / config_.Gamma;
    s.Y = Eigen::VectorXd::Constant(1, Ybar);
    return s;
}

double SteadyWave::other_root(double Ybar) const
{
    return k_ * b_ - sigma_ * std::sqrt(std::max(0.0, discriminant(Ybar)));
}

StateW SteadyWave::profile_at(double y) const
{
    if (y >= 0.0)
        return neumann_;
    return state_at(std::exp(rate() * y) * Y0());
}

Eigen::VectorXd SteadyWave::profile_derivative(double y) const
{
    const double G = config_.Gamma;
    const double Ybar = std::exp(rate() * std::min(y, 0.0)) * Y0();
    const StateW s = state_at(Ybar);
    const double dY = rate() * Ybar;
    const double du = sigma_ * (G * config_.q[0] / (G + 2.0)) / std::sqrt(discriminant(Ybar)) * dY;
    Eigen::VectorXd d(4);
    d << m_ / (s.u * s.u) * du, du, (b_ - 2.0 * s.u) / G * du, dY;
    return d;
}

double SteadyWave::dx_dy(double y) const
{
    const StateW s = profile_at(y);
    return m_ / (s.rho * ignition_factor(s.e / config_.Cv, config_));
}

namespace {

OdeField position_field(const SteadyWave& wave)
{
    OdeField f;
    f.dimension = 1;
    f.eval = [&wave](double y, const CVector&) {
        CVector d(1);
        d[0] = wave.dx_dy(y);
        return d;
    };
    return f;
}

IntegratorOptions quadrature_options()
{
    IntegratorOptions o;
    o.rel_tol = 1e-13;
    o.abs_tol = 1e-15;
    o.max_step_fraction = 1.0;
    return o;
}

} // namespace

double SteadyWave::x_at(double y) const
{
    if (y > 0.0)
        throw DomainError("x_at: y must be <= 0");
    if (y == 0.0)
        return 0.0;
    CVector init = CVector::Zero(1);
    return integrate_adaptive(position_field(*this), 0.0, y, init, quadrature_options()).state[0].real();
}

std::vector<double> SteadyWave::x_of_y(std::span<const double> y_grid) const
{
    for (std::size_t i = 0; i < y_grid.size(); ++i) {
        if (y_grid[i] > 0.0)
            throw DomainError("x_of_y: grid values must be <= 0");
        if (i > 0 && y_grid[i] > y_grid[i - 1])
            throw DomainError("x_of_y: grid must be sorted descending");
    }
    std::vector<double> nodes{0.0};
    nodes.insert(nodes.end(), y_grid.begin(), y_grid.end());
    auto states = integrate_through(position_field(*this), nodes, CVector::Zero(1), quadrature_options());
    std::vector<double> x;
    x.reserve(y_grid.size());
    for (std::size_t i = 1; i < states.size(); ++i)
        x.push_back(states[i][0].real());
    return x;
}

double SteadyWave::M_y() const
{
    const double Y0v = Y0();
    if (Y0v <= config_.eps_Y)
        return 0.0;
    return std::log(Y0v / config_.eps_Y) / rate();
}

double SteadyWave::default_M() const
{
    return std::max(M_y(), 5.0 / rate());
}

Eigen::Vector3d SteadyWave::jump_residuals(const StateW& s) const
{
    const double G = config_.Gamma;
    Eigen::Vector3d r;
    r[0] = (s.rho * s.u + m_) / m_;
    r[1] = (s.u + G * s.e / s.u - b_) / std::abs(b_);
    r[2] = (0.5 * s.u * s.u + (G + 1.0) * s.e + config_.q[0] * s.Y[0] - c_) / std::abs(c_);
    return r;
}

SteadyWave build_wave(const GasWaveConfig& config, double eps_cj)
{
    config.validate();
    if (config.species() != 1)
        throw DomainError("the closed-form profile supports a single reaction (r = 1)");

    SteadyWave w;
    w.config_ = config;
    const double G = config.Gamma;
    const UpstreamState& up = config.upstream;
    w.m_ = -up.rho * up.u;
    w.b_ = up.u + G * up.e / up.u;
    w.c_ = 0.5 * up.u * up.u + (G + 1.0) * up.e + config.q[0] * config.Y0[0];
    w.k_ = (G + 1.0) / (G + 2.0);
    w.sigma_ = w.b_ > 0.0 ? -1.0 : 1.0;

    w.upstream_.rho = up.rho;
    w.upstream_.u = up.u;
    w.upstream_.e = up.e;
    w.upstream_.Y = config.Y0;

    const double Y0v = config.Y0[0];
    w.disc_min_ = std::min(w.discriminant(0.0), w.discriminant(Y0v));
    const double scale = w.k_ * w.k_ * w.b_ * w.b_;
    if (w.disc_min_ <= eps_cj * scale)
        throw ChapmanJouguetOrSonic(w.disc_min_);

    const double c_up = std::sqrt(G * (G + 1.0) * up.e);
    if (std::abs(up.u) <= c_up * (1.0 + 1e-12))
        throw ConfigError("upstream.u", "upstream flow must be supersonic relative to the shock");

    w.neumann_ = w.state_at(Y0v);
    w.burned_ = w.state_at(0.0);
    w.burned_.Y.setZero();
    if (!(std::abs(w.neumann_.u) < std::abs(up.u)))
        throw ConfigError("upstream", "no compressive shock for this upstream state");

    if (up.e / config.Cv > config.Ti_low)
        throw InvalidIgnitionWindow("upstream temperature " + std::to_string(up.e / config.Cv) +
                                    " exceeds the ignition temperature Ti_low = " + std::to_string(config.Ti_low));
    // e is concave in u along the branch, so T is smallest at an endpoint.
    const double T_min = std::min(w.neumann_.e, w.burned_.e) / config.Cv;
    if (T_min < config.Ti_high)
        throw InvalidIgnitionWindow("profile temperature " + std::to_string(T_min) +
                                    " drops below the cutoff Ti_high = " + std::to_string(config.Ti_high));
    return w;
}

} // namespace zndstab
