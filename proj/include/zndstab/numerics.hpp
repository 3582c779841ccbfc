#pragma once

// Adaptive Dormand-Prince integration of complex linear/nonlinear ODEs,
// argument-principle winding numbers, contour refinement and a
// finite-difference Newton solver for analytic functions.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace zndstab {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

// Right-hand side z' = eval(x, z) of a complex ODE system.
struct OdeField {
    std::size_t dimension = 0;
    std::function<CVector(double, const CVector&)> eval;
};

struct SolveStats {
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
    std::size_t rhs_evaluations = 0;
    double x_start = 0.0;
    double x_end = 0.0;
    bool overflowed = false;       // set only when IntegratorOptions::continue_on_overflow
    double overflow_position = 0.0;

    // Mesh nodes including both endpoints.
    std::size_t mesh_points() const { return accepted_steps + 1; }
    SolveStats& operator+=(const SolveStats& other);
};

enum class StepControl {
    // MATLAB ode45 conventions: error measured against max(|z|, |z_new|, abs/rel)
    // and compared to rel_tol; max step 0.1*|span|; growth 0.8*(tol/err)^(1/5) <= 5.
    ode45,
    // err = max |e_i| / (abs + rel*|z_i|) <= 1, h *= clamp(0.9 err^(-1/5), 0.2, 5),
    // initial step 1e-2*|span|.
    elementary,
};

struct IntegratorOptions {
    double rel_tol = 1e-5;
    double abs_tol = 1e-5;
    StepControl control = StepControl::ode45;
    double max_step_fraction = 0.1; // ode45 only
    std::size_t max_steps = 50'000'000;
    // ode45 only: keep stepping through non-finite states the way MATLAB does
    // (NaN error estimates compare false and are accepted) instead of throwing.
    bool continue_on_overflow = false;
};

struct Solution {
    CVector state;
    SolveStats stats;
};

// Integrates from span_start to span_end (either direction). Throws
// StepSizeUnderflow or NonFiniteState with the position of failure.
Solution integrate_adaptive(const OdeField& field, double span_start, double span_end, const CVector& init,
                            const IntegratorOptions& options = {});

Solution integrate_adaptive(const OdeField& field, double span_start, double span_end, const CVector& init,
                            double rel_tol, double abs_tol);

// Integrates through an ordered list of nodes (monotone in either direction),
// restarting the controller on each segment; returns the state at every node
// (the first entry is `init`).
std::vector<CVector> integrate_through(const OdeField& field, std::span<const double> nodes, const CVector& init,
                                       const IntegratorOptions& options = {}, SolveStats* stats = nullptr);

// ---------------------------------------------------------------------------
// Contours

using ComplexMap = std::function<cplx(cplx)>;

class Contour {
public:
    enum class Kind { semicircle, circle, polyline };

    // Right half disc of `radius` whose flat side sits on Re = axis_offset;
    // traversed counter-clockwise starting at axis_offset - i*radius.
    static Contour semicircle(double radius, double axis_offset, std::size_t n_nodes);
    static Contour circle(cplx center, double radius, std::size_t n_nodes);
    // `vertices` lists the corners in counter-clockwise order (not repeated).
    static Contour polyline(std::vector<cplx> vertices, std::size_t nodes_per_edge = 2);

    Kind kind() const { return kind_; }
    double radius() const { return radius_; }
    cplx center() const { return center_; }
    double axis_offset() const { return axis_offset_; }

    // Point at curve parameter t in [0, 1]; point(0) == point(1).
    cplx point(double t) const;

    // Node parameters and positions; the last node repeats the first.
    const std::vector<double>& params() const { return params_; }
    const std::vector<cplx>& nodes() const { return nodes_; }

private:
    Contour() = default;
    void place_uniform(std::size_t n_nodes);

    Kind kind_ = Kind::circle;
    cplx center_{0.0, 0.0};
    double radius_ = 1.0;
    double axis_offset_ = 0.0;
    std::vector<cplx> vertices_;
    std::vector<double> edge_ends_; // cumulative normalized edge lengths (polyline)
    std::vector<double> params_;
    std::vector<cplx> nodes_;
};

// Values of a map sampled along a closed contour (last entry repeats the first).
struct ContourSamples {
    std::vector<double> params;
    std::vector<cplx> nodes;
    std::vector<cplx> values;
    std::size_t size() const { return values.size(); }
};

struct WindingOptions {
    double phase_limit = 1.5707963267948966; // pi/2
    double abs_floor = 0.0;
};

// Winding number of the sampled values about 0. The list is treated as
// closed (the step from the last sample back to the first is included).
int winding_number(std::span<const cplx> samples, const WindingOptions& options = {});

struct RefineOptions {
    int max_depth = 12;
    unsigned jobs = 1;
};

// Bisects arcs until every consecutive phase step is below max_phase_step.
ContourSamples refine_contour(const ComplexMap& evaluator, const Contour& contour, double max_phase_step,
                              const RefineOptions& options = {});

// Runs body(0..n-1) on up to `jobs` threads; rethrows the first exception.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& body);

// Evaluates f at every point, using up to `jobs` threads.
std::vector<cplx> evaluate_all(const ComplexMap& f, std::span<const cplx> points, unsigned jobs);

struct NewtonResult {
    cplx root;
    int iterations = 0;
    double residual = 0.0; // |f(root)|
};

// Newton iteration with a centered finite-difference derivative along the
// real axis, h = 1e-6 * max(1, |lambda|).
NewtonResult newton_root(const ComplexMap& evaluator, cplx seed, double tol = 1e-10, int max_iter = 50);

} // namespace zndstab
