#pragma once

// Ideal-gas reactive Euler model with a one-step Arrhenius reaction, and the
// closed-form steady strong detonation profile in the reaction coordinate y.
//
// State ordering is W = (rho, u, e, Y_1..Y_r). The steady frame has the shock
// at x = 0, unburned gas at x > 0 and u < 0 throughout (mass flux m = -rho*u).

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace zndstab {

struct UpstreamState {
    double rho = 1.0;
    double u = -1.0;
    double e = 1.0;
};

struct GasWaveConfig {
    double Gamma = 0.2;
    double Cv = 1.0;
    Eigen::VectorXd q = Eigen::VectorXd::Constant(1, 50.0);
    double EA = 120.0;
    double Ti_low = 10.0;
    double Ti_high = 30.0;
    Eigen::MatrixXd K = Eigen::MatrixXd::Constant(1, 1, 1.0);
    Eigen::VectorXd Y0 = Eigen::VectorXd::Constant(1, 1.0);
    UpstreamState upstream;
    double tol = 1e-5;
    double eps_Y = 1e-8;

    std::size_t species() const { return static_cast<std::size_t>(Y0.size()); }
    double gas_constant() const { return (Gamma + 1.0) * Cv; }

    // Throws ConfigError naming the first offending field.
    void validate() const;

    // Convenience constructor for a single reaction (r = 1).
    static GasWaveConfig single(double Gamma, double Cv, double q, double EA, double Ti_low, double Ti_high, double K,
                                double Y0, UpstreamState upstream);
};

struct StateW {
    double rho = 1.0;
    double u = 0.0;
    double e = 1.0;
    Eigen::VectorXd Y;

    Eigen::VectorXd to_vector() const;
    static StateW from_vector(const Eigen::VectorXd& w);
};

struct Thermo {
    double p;
    double T;
    double c_s;
    double p_rho;
    double p_e;
};

// Throws DomainError for rho <= 0 or e <= 0.
Thermo thermo(const StateW& state, const GasWaveConfig& config);

// Arrhenius factor exp(-EA / (R T)).
double ignition_factor(double T, const GasWaveConfig& config);

struct Fluxes {
    Eigen::VectorXd F0;
    Eigen::VectorXd F1;
    Eigen::VectorXd R;
};

// `reacting` selects the burning side (beta = 1); otherwise R = 0.
Fluxes fluxes(const StateW& state, const GasWaveConfig& config, bool reacting = true);

// Nonreactive Euler flux (rho u, rho u^2 + p, (rho E + p) u).
Eigen::Vector3d euler_flux(double rho, double u, double e, double Gamma);

class SteadyWave {
public:
    const GasWaveConfig& config() const { return config_; }

    double m() const { return m_; }
    double rh_b() const { return b_; }
    double rh_c() const { return c_; }
    double discriminant_min() const { return disc_min_; }
    double rate() const { return config_.K(0, 0); }
    double Y0() const { return config_.Y0[0]; }

    // Unburned state ahead of the shock, including Y = Y0.
    const StateW& upstream() const { return upstream_; }
    const StateW& neumann() const { return neumann_; }
    const StateW& burned() const { return burned_; }

    // Square-root argument of the profile quadratic at reactant level Ybar.
    double discriminant(double Ybar) const;
    // Gas state on the compressive branch for reactant level Ybar.
    StateW state_at(double Ybar) const;
    // The other root of the quadratic (equals the upstream velocity at Ybar = Y0).
    double other_root(double Ybar) const;

    StateW profile_at(double y) const;
    // dW/dy along the profile, analytic.
    Eigen::VectorXd profile_derivative(double y) const;
    // dx/dy = m / (rho phi(T)).
    double dx_dy(double y) const;

    // Physical position of reaction coordinate y <= 0 (x(0) = 0).
    double x_at(double y) const;
    // Cumulative x along a grid sorted descending (need not start at 0).
    std::vector<double> x_of_y(std::span<const double> y_grid) const;

    // ln(Y0/eps_Y)/K (0 when Y0 <= eps_Y).
    double M_y() const;
    // max(M_y, 5/K): the truncation used when none is given.
    double default_M() const;

    // Relative residuals of the three steady jump conditions between the
    // upstream state and `state` (mass, momentum, energy).
    Eigen::Vector3d jump_residuals(const StateW& state) const;

private:
    friend SteadyWave build_wave(const GasWaveConfig& config, double eps_cj);
    GasWaveConfig config_;
    double m_ = 0.0, b_ = 0.0, c_ = 0.0, k_ = 0.0, sigma_ = -1.0;
    double disc_min_ = 0.0;
    StateW upstream_, neumann_, burned_;
};

// Throws ChapmanJouguetOrSonic when discriminant_min <= eps_cj * (k b)^2,
// InvalidIgnitionWindow when the ignition window is violated, ConfigError for
// invalid parameters, and DomainError for r != 1.
SteadyWave build_wave(const GasWaveConfig& config, double eps_cj = 1e-10);

} // namespace zndstab
