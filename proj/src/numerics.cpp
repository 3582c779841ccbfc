#include "zndstab/numerics.hpp"
#include "zndstab/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

namespace zndstab {

SolveStats& SolveStats::operator+=(const SolveStats& other)
{
    if (other.overflowed && !overflowed) {
        overflowed = true;
        overflow_position = other.overflow_position;
    }
    accepted_steps += other.accepted_steps;
    rejected_steps += other.rejected_steps;
    rhs_evaluations += other.rhs_evaluations;
    x_end = other.x_end;
    return *this;
}

namespace {

// Dormand-Prince 5(4) tableau (FSAL).
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                 b6 = 11.0 / 84.0;
// b - b* (fifth minus fourth order weights)
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

bool all_finite(const CVector& v)
{
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag()))
            return false;
    }
    return true;
}

double max_abs(const CVector& v)
{
    double m = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        m = std::max(m, std::abs(v[i]));
    return m;
}

struct Stepper {
    const OdeField& field;
    CVector k1, k2, k3, k4, k5, k6, k7, tmp, next, err;

    explicit Stepper(const OdeField& f) : field(f) {}

    // One trial step of size h from (x, z) with k1 = f(x, z) already known.
    void attempt(double x, const CVector& z, double h)
    {
        tmp = z + h * (a21 * k1);
        k2 = field.eval(x + c2 * h, tmp);
        tmp = z + h * (a31 * k1 + a32 * k2);
        k3 = field.eval(x + c3 * h, tmp);
        tmp = z + h * (a41 * k1 + a42 * k2 + a43 * k3);
        k4 = field.eval(x + c4 * h, tmp);
        tmp = z + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        k5 = field.eval(x + c5 * h, tmp);
        tmp = z + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        k6 = field.eval(x + h, tmp);
        next = z + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        k7 = field.eval(x + h, next);
        err = e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7; // times h
    }
};

constexpr double overflow_guard = 1e290;

Solution run_ode45(const OdeField& field, double x0, double x1, const CVector& init, const IntegratorOptions& opt)
{
    const double span = std::abs(x1 - x0);
    const double dir = x1 > x0 ? 1.0 : -1.0;
    const double rtol = opt.rel_tol;
    const double threshold = opt.abs_tol / opt.rel_tol;
    const double hmax = opt.max_step_fraction * span;
    const double eps = std::numeric_limits<double>::epsilon();
    auto hmin_at = [&](double x) { return std::max(16.0 * eps * std::abs(x), 1e-14 * span); };

    Solution sol;
    sol.stats.x_start = x0;
    sol.stats.x_end = x1;

    Stepper st(field);
    CVector z = init;
    double x = x0;
    st.k1 = field.eval(x, z);
    sol.stats.rhs_evaluations = 1;

    double absh = std::min(hmax, span);
    {
        double rh = 0.0;
        for (Eigen::Index i = 0; i < z.size(); ++i)
            rh = std::max(rh, std::abs(st.k1[i]) / std::max(std::abs(z[i]), threshold));
        rh /= 0.8 * std::pow(rtol, 0.2);
        if (absh * rh > 1.0)
            absh = 1.0 / rh;
        absh = std::max(absh, hmin_at(x));
    }

    bool done = false;
    while (!done) {
        const double hmin = hmin_at(x);
        absh = std::min(hmax, std::max(hmin, absh));
        double h = dir * absh;
        if (1.1 * absh >= std::abs(x1 - x)) {
            h = x1 - x;
            absh = std::abs(h);
            done = true;
        }

        bool no_failed = true;
        double errn = 0.0;
        double x_new = x;
        while (true) {
            st.attempt(x, z, h);
            sol.stats.rhs_evaluations += 6;
            x_new = done ? x1 : x + h;
            h = x_new - x;

            bool finite = all_finite(st.next) && all_finite(st.err);
            if (finite) {
                errn = 0.0;
                for (Eigen::Index i = 0; i < z.size(); ++i) {
                    double scale = std::max({std::abs(z[i]), std::abs(st.next[i]), threshold});
                    errn = std::max(errn, std::abs(st.err[i]) / scale);
                }
                errn *= absh;
            } else if (opt.continue_on_overflow) {
                errn = std::numeric_limits<double>::quiet_NaN();
            } else {
                if (max_abs(z) > overflow_guard)
                    throw NonFiniteState(x);
                errn = std::numeric_limits<double>::infinity();
            }

            if (errn > rtol) {
                ++sol.stats.rejected_steps;
                if (absh <= hmin)
                    throw StepSizeUnderflow(x);
                if (no_failed) {
                    no_failed = false;
                    double fac = std::isfinite(errn) ? std::max(0.1, 0.8 * std::pow(rtol / errn, 0.2)) : 0.1;
                    absh = std::max(hmin, absh * fac);
                } else {
                    absh = std::max(hmin, 0.5 * absh);
                }
                h = dir * absh;
                done = false;
            } else {
                break;
            }
        }

        ++sol.stats.accepted_steps;
        if (sol.stats.accepted_steps > opt.max_steps)
            throw StepSizeUnderflow(x);
        if (no_failed) {
            double temp = 1.25 * std::pow(errn / rtol, 0.2);
            absh = temp > 0.2 ? absh / temp : 5.0 * absh;
        }
        x = x_new;
        z = st.next;
        st.k1 = st.k7;
        if (!all_finite(z) || max_abs(z) > overflow_guard) {
            if (!opt.continue_on_overflow)
                throw NonFiniteState(x);
            if (!sol.stats.overflowed) {
                sol.stats.overflowed = true;
                sol.stats.overflow_position = x;
            }
        }
    }
    sol.state = std::move(z);
    return sol;
}

Solution run_elementary(const OdeField& field, double x0, double x1, const CVector& init,
                        const IntegratorOptions& opt)
{
    const double span = std::abs(x1 - x0);
    const double dir = x1 > x0 ? 1.0 : -1.0;
    const double hmin = 1e-14 * span;

    Solution sol;
    sol.stats.x_start = x0;
    sol.stats.x_end = x1;

    Stepper st(field);
    CVector z = init;
    double x = x0;
    st.k1 = field.eval(x, z);
    sol.stats.rhs_evaluations = 1;

    double absh = 1e-2 * span;
    bool done = false;
    while (!done) {
        bool rejected = false;
        while (true) {
            double h = dir * absh;
            bool last = absh >= std::abs(x1 - x);
            if (last)
                h = x1 - x;
            st.attempt(x, z, h);
            sol.stats.rhs_evaluations += 6;

            double errn = std::numeric_limits<double>::infinity();
            if (all_finite(st.next) && all_finite(st.err)) {
                errn = 0.0;
                for (Eigen::Index i = 0; i < z.size(); ++i)
                    errn = std::max(errn, std::abs(h * st.err[i]) / (opt.abs_tol + opt.rel_tol * std::abs(z[i])));
            } else if (max_abs(z) > overflow_guard) {
                throw NonFiniteState(x);
            }

            double fac = errn > 0.0 ? 0.9 * std::pow(errn, -0.2) : 5.0;
            fac = std::isfinite(fac) ? std::clamp(fac, 0.2, 5.0) : 0.2;
            if (errn <= 1.0) {
                x = last ? x1 : x + h;
                z = st.next;
                st.k1 = st.k7;
                ++sol.stats.accepted_steps;
                absh *= rejected ? std::min(1.0, fac) : fac;
                done = last;
                break;
            }
            ++sol.stats.rejected_steps;
            rejected = true;
            absh *= fac;
            if (absh < hmin)
                throw StepSizeUnderflow(x);
        }
        if (sol.stats.accepted_steps > opt.max_steps)
            throw StepSizeUnderflow(x);
        if (max_abs(z) > overflow_guard)
            throw NonFiniteState(x);
    }
    sol.state = std::move(z);
    return sol;
}

} // namespace

Solution integrate_adaptive(const OdeField& field, double span_start, double span_end, const CVector& init,
                            const IntegratorOptions& options)
{
    if (span_start == span_end)
        throw DomainError("integrate_adaptive: span endpoints must differ");
    if (static_cast<std::size_t>(init.size()) != field.dimension)
        throw DomainError("integrate_adaptive: initial vector has wrong dimension");
    if (!(options.rel_tol > 0.0) || !(options.abs_tol > 0.0))
        throw DomainError("integrate_adaptive: tolerances must be positive");
    if (!all_finite(init))
        throw NonFiniteState(span_start);

    if (options.control == StepControl::ode45)
        return run_ode45(field, span_start, span_end, init, options);
    return run_elementary(field, span_start, span_end, init, options);
}

Solution integrate_adaptive(const OdeField& field, double span_start, double span_end, const CVector& init,
                            double rel_tol, double abs_tol)
{
    IntegratorOptions opt;
    opt.rel_tol = rel_tol;
    opt.abs_tol = abs_tol;
    return integrate_adaptive(field, span_start, span_end, init, opt);
}

std::vector<CVector> integrate_through(const OdeField& field, std::span<const double> nodes, const CVector& init,
                                       const IntegratorOptions& options, SolveStats* stats)
{
    std::vector<CVector> out;
    out.reserve(nodes.size());
    if (nodes.empty())
        return out;
    out.push_back(init);
    SolveStats total;
    total.x_start = nodes.front();
    total.x_end = nodes.front();
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        if (nodes[i] == nodes[i - 1]) {
            out.push_back(out.back());
            continue;
        }
        Solution s = integrate_adaptive(field, nodes[i - 1], nodes[i], out.back(), options);
        total += s.stats;
        out.push_back(std::move(s.state));
    }
    if (stats)
        *stats = total;
    return out;
}

// ---------------------------------------------------------------------------

Contour Contour::semicircle(double radius, double axis_offset, std::size_t n_nodes)
{
    if (!(radius > 0.0))
        throw DomainError("semicircle radius must be positive");
    Contour c;
    c.kind_ = Kind::semicircle;
    c.radius_ = radius;
    c.axis_offset_ = axis_offset;
    c.center_ = cplx(axis_offset, 0.0);
    c.place_uniform(n_nodes);
    return c;
}

Contour Contour::circle(cplx center, double radius, std::size_t n_nodes)
{
    if (!(radius > 0.0))
        throw DomainError("circle radius must be positive");
    Contour c;
    c.kind_ = Kind::circle;
    c.radius_ = radius;
    c.center_ = center;
    c.place_uniform(n_nodes);
    return c;
}

Contour Contour::polyline(std::vector<cplx> vertices, std::size_t nodes_per_edge)
{
    if (vertices.size() < 3)
        throw DomainError("polyline contour needs at least three vertices");
    Contour c;
    c.kind_ = Kind::polyline;
    c.vertices_ = std::move(vertices);
    const std::size_t n = c.vertices_.size();
    double total = 0.0;
    std::vector<double> lengths(n);
    for (std::size_t i = 0; i < n; ++i) {
        lengths[i] = std::abs(c.vertices_[(i + 1) % n] - c.vertices_[i]);
        total += lengths[i];
    }
    c.edge_ends_.resize(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += lengths[i];
        c.edge_ends_[i] = acc / total;
    }
    c.edge_ends_.back() = 1.0;

    nodes_per_edge = std::max<std::size_t>(nodes_per_edge, 1);
    while (n * nodes_per_edge < 8)
        ++nodes_per_edge;
    double start = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < nodes_per_edge; ++k) {
            double t = start + (c.edge_ends_[i] - start) * static_cast<double>(k) / static_cast<double>(nodes_per_edge);
            c.params_.push_back(t);
            c.nodes_.push_back(c.point(t));
        }
        start = c.edge_ends_[i];
    }
    c.params_.push_back(1.0);
    c.nodes_.push_back(c.nodes_.front());
    return c;
}

void Contour::place_uniform(std::size_t n_nodes)
{
    if (n_nodes < 8)
        throw DomainError("a contour needs at least 8 nodes");
    params_.resize(n_nodes + 1);
    nodes_.resize(n_nodes + 1);
    for (std::size_t k = 0; k < n_nodes; ++k) {
        params_[k] = static_cast<double>(k) / static_cast<double>(n_nodes);
        nodes_[k] = point(params_[k]);
    }
    params_[n_nodes] = 1.0;
    nodes_[n_nodes] = nodes_[0];
}

cplx Contour::point(double t) const
{
    using std::numbers::pi;
    switch (kind_) {
    case Kind::circle:
        return center_ + radius_ * std::polar(1.0, 2.0 * pi * t);
    case Kind::semicircle: {
        const double arc = pi / (pi + 2.0);
        if (t <= arc) {
            double theta = -pi / 2.0 + pi * t / arc;
            return cplx(axis_offset_, 0.0) + radius_ * std::polar(1.0, theta);
        }
        double s = (t - arc) / (1.0 - arc);
        return cplx(axis_offset_, radius_ * (1.0 - 2.0 * s));
    }
    case Kind::polyline: {
        const std::size_t n = vertices_.size();
        double start = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (t <= edge_ends_[i] || i + 1 == n) {
                double s = (t - start) / (edge_ends_[i] - start);
                return vertices_[i] + s * (vertices_[(i + 1) % n] - vertices_[i]);
            }
            start = edge_ends_[i];
        }
        return vertices_.front();
    }
    }
    return {};
}

int winding_number(std::span<const cplx> samples, const WindingOptions& options)
{
    const std::size_t n = samples.size();
    if (n < 2)
        throw DomainError("winding_number needs at least two samples");
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const cplx a = samples[k];
        const cplx b = samples[(k + 1) % n];
        if (std::abs(a) <= options.abs_floor || a == cplx(0.0, 0.0))
            throw ContourThroughRoot("sample magnitude below floor", a);
        double step = std::arg(b / a);
        if (std::abs(step) >= options.phase_limit)
            throw UnderSampledContour("phase step of " + std::to_string(step) + " rad between samples " +
                                      std::to_string(k) + " and " + std::to_string((k + 1) % n) +
                                      "; refine the contour");
        total += step;
    }
    return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& body)
{
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next = n;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

std::vector<cplx> evaluate_all(const ComplexMap& f, std::span<const cplx> points, unsigned jobs)
{
    std::vector<cplx> out(points.size());
    parallel_for(points.size(), jobs, [&](std::size_t i) { out[i] = f(points[i]); });
    return out;
}

ContourSamples refine_contour(const ComplexMap& evaluator, const Contour& contour, double max_phase_step,
                              const RefineOptions& options)
{
    if (!(max_phase_step > 0.0) || max_phase_step > std::numbers::pi / 2.0 + 1e-15)
        throw DomainError("max_phase_step must lie in (0, pi/2]");

    ContourSamples s;
    s.params = contour.params();
    s.nodes = contour.nodes();
    {
        std::span<const cplx> distinct(s.nodes.data(), s.nodes.size() - 1);
        s.values = evaluate_all(evaluator, distinct, options.jobs);
        s.values.push_back(s.values.front());
    }
    auto check_value = [](cplx v, cplx where) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()) || v == cplx(0.0, 0.0))
            throw ContourThroughRoot("evaluator vanished or is non-finite on the contour", where);
    };
    for (std::size_t i = 0; i < s.values.size(); ++i)
        check_value(s.values[i], s.nodes[i]);

    std::vector<int> depth(s.values.size() - 1, 0);
    while (true) {
        std::vector<std::size_t> flagged;
        for (std::size_t i = 0; i + 1 < s.values.size(); ++i) {
            if (std::abs(std::arg(s.values[i + 1] / s.values[i])) >= max_phase_step) {
                if (depth[i] >= options.max_depth)
                    throw ContourThroughRoot("phase refinement depth exceeded", s.nodes[i]);
                flagged.push_back(i);
            }
        }
        if (flagged.empty())
            break;

        std::vector<double> mid_t(flagged.size());
        std::vector<cplx> mid_z(flagged.size());
        for (std::size_t j = 0; j < flagged.size(); ++j) {
            std::size_t i = flagged[j];
            mid_t[j] = 0.5 * (s.params[i] + s.params[i + 1]);
            mid_z[j] = contour.point(mid_t[j]);
        }
        std::vector<cplx> mid_v = evaluate_all(evaluator, mid_z, options.jobs);
        for (std::size_t j = 0; j < flagged.size(); ++j)
            check_value(mid_v[j], mid_z[j]);

        ContourSamples next;
        std::vector<int> next_depth;
        const std::size_t grown = s.values.size() + flagged.size();
        next.params.reserve(grown);
        next.nodes.reserve(grown);
        next.values.reserve(grown);
        std::size_t j = 0;
        for (std::size_t i = 0; i + 1 < s.values.size(); ++i) {
            next.params.push_back(s.params[i]);
            next.nodes.push_back(s.nodes[i]);
            next.values.push_back(s.values[i]);
            if (j < flagged.size() && flagged[j] == i) {
                next_depth.push_back(depth[i] + 1);
                next_depth.push_back(depth[i] + 1);
                next.params.push_back(mid_t[j]);
                next.nodes.push_back(mid_z[j]);
                next.values.push_back(mid_v[j]);
                ++j;
            } else {
                next_depth.push_back(depth[i]);
            }
        }
        next.params.push_back(s.params.back());
        next.nodes.push_back(s.nodes.back());
        next.values.push_back(s.values.back());
        s = std::move(next);
        depth = std::move(next_depth);
    }
    return s;
}

NewtonResult newton_root(const ComplexMap& evaluator, cplx seed, double tol, int max_iter)
{
    if (!(tol > 0.0))
        throw DomainError("newton_root: tol must be positive");
    cplx lambda = seed;
    for (int it = 1; it <= max_iter; ++it) {
        cplx f = evaluator(lambda);
        if (f == cplx(0.0, 0.0))
            return {lambda, it, 0.0};
        const double h = 1e-6 * std::max(1.0, std::abs(lambda));
        cplx df = (evaluator(lambda + h) - evaluator(lambda - h)) / (2.0 * h);
        if (!(std::abs(df) >= 1e-14))
            throw DegenerateRoot("derivative magnitude below 1e-14 near lambda = (" + std::to_string(lambda.real()) +
                                 ", " + std::to_string(lambda.imag()) + ")");
        cplx step = f / df;
        lambda -= step;
        if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()))
            throw NoConvergence("Newton iterate became non-finite");
        if (std::abs(step) < tol)
            return {lambda, it, std::abs(evaluator(lambda))};
    }
    throw NoConvergence("Newton did not converge in " + std::to_string(max_iter) + " iterations from seed (" +
                        std::to_string(seed.real()) + ", " + std::to_string(seed.imag()) + ")");
}

} // namespace zndstab
