#include "doctest.h"
#include "support.hpp"

#include "zndstab/evans.hpp"

#include <cmath>

using namespace zndstab;
using zndstab::testing::rel;
using zndstab::testing::shipped;

namespace {

const Method all_methods[] = {Method::neutral, Method::erpenbeck, Method::lee_stewart};

const std::vector<cplx>& sample_lambdas()
{
    static const std::vector<cplx> v{{0.5, 0},   {1, 1},    {0.3, 2},   {2, -1},   {0.1, 0.5},
                                     {1.5, 3},   {0.2, -1.5}, {1, 0.2}, {0.05, 1.8}, {1.9, 0.4}};
    return v;
}

// Root of the unstable_ls wave from an independent implementation of the
// neutral method (separate code base, tolerance 1e-10).
const cplx reference_root(0.12532684763489, 0.88535802318005);

} // namespace

TEST_CASE("method names")
{
    for (Method m : all_methods)
        CHECK(parse_method(to_string(m)) == m);
    CHECK(parse_method("lee-stewart") == Method::lee_stewart);
    CHECK_FALSE(parse_method("shooting").has_value());
}

TEST_CASE("the three methods agree after the normalization factor")
{
    for (const char* name : {"default", "unstable_ls"}) {
        const SteadyWave w = build_wave(shipped(name));
        for (cplx lambda : sample_lambdas()) {
            const EvansResult n = evans_neutral(w, lambda);
            const EvansResult e = evans_erpenbeck(w, lambda);
            const EvansResult l = evans_lee_stewart(w, lambda);
            CHECK(n.kappa == cplx(1.0));
            CHECK(rel(e.canonical(), n.canonical()) < 1e-3);
            CHECK(rel(l.canonical(), n.canonical()) < 1e-3);
            CHECK(e.kappa == l.kappa);
            CHECK(e.x_M > 0.0);

            EvansOptions tight;
            tight.tol = 1e-9;
            const cplx nt = evans_neutral(w, lambda, tight).canonical();
            CHECK(rel(evans_erpenbeck(w, lambda, tight).canonical(), nt) < 1e-6);
            CHECK(rel(evans_lee_stewart(w, lambda, tight).canonical(), nt) < 1e-6);
        }
    }
}

TEST_CASE("reference values at lambda = 1 + i on the unstable wave")
{
    // Same independent implementation as reference_root.
    const SteadyWave w = build_wave(shipped("unstable_ls"));
    EvansOptions o;
    o.tol = 1e-10;
    for (Method m : all_methods)
        CHECK(rel(evaluate_evans(w, cplx(1, 1), m, o).canonical(), cplx(-151.24948417257423, -282.3636463658566)) <
              1e-8);
    CHECK(rel(evans_neutral(w, 2.0, o).D, cplx(-492.2740527109344)) < 1e-8);
}

TEST_CASE("conjugate symmetry")
{
    const SteadyWave w = build_wave(shipped("unstable_ls"));
    for (Method m : all_methods)
        for (cplx lambda : sample_lambdas()) {
            const cplx a = evaluate_evans(w, lambda, m).canonical();
            const cplx b = evaluate_evans(w, std::conj(lambda), m).canonical();
            CHECK(rel(b, std::conj(a)) < 1e-12);
        }
    CHECK(std::abs(evans_neutral(w, 0.7).D.imag()) == 0.0);
}

TEST_CASE("nonreactive shock: constant-coefficient closed form")
{
    // Profile is constant, so conj(ell) solves the factored adjoint exactly
    // and D = ell^T jump for every M. The other modes are strongly damped, so
    // loose tolerances let the controller step near the stability limit;
    // check at a tight one.
    const SteadyWave w = build_wave(shipped("nonreactive"));
    for (cplx lambda : sample_lambdas()) {
        const SpectralFrame f = SpectralFrame::make(w, lambda);
        const cplx exact = (f.ell.transpose() * f.jump)(0, 0);
        EvansOptions o;
        o.M = 3.0;
        CHECK(rel(evans_neutral(w, lambda, o).D, exact) < 1e-3);
        o.tol = 1e-11;
        const EvansResult n = evans_neutral(w, lambda, o);
        CHECK(rel(n.D, exact) < 1e-10);
        CHECK(std::abs(n.growth - 1.0) < 1e-10);
        CHECK(rel(evans_erpenbeck(w, lambda, o).canonical(), exact) < 1e-8);
        CHECK(rel(evans_lee_stewart(w, lambda, o).canonical(), exact) < 1e-8);
        CHECK(duality_check(w, lambda, 3.0, 50, 1e-11).max_deviation < 1e-10);
    }
}

TEST_CASE("truncation length robustness")
{
    for (const char* name : {"default", "unstable_ls"}) {
        const SteadyWave w = build_wave(shipped(name));
        EvansOptions a;
        a.tol = 1e-10;
        a.M = w.M_y();
        EvansOptions b = a;
        b.M = w.M_y() + 2.0;
        for (cplx lambda : sample_lambdas())
            CHECK(rel(evans_neutral(w, lambda, b).D, evans_neutral(w, lambda, a).D) < 1e-6);
        CHECK(evans_neutral(w, 1.0).M == w.default_M());
    }
}

TEST_CASE("neutral D is analytic (Cauchy-Riemann)")
{
    const SteadyWave w = build_wave(shipped("unstable_ls"));
    EvansOptions o;
    o.tol = 1e-10;
    const ComplexMap D = evans_map(w, Method::neutral, o);
    const double h = 1e-3;
    for (int k = 0; k < 8; ++k) {
        const cplx c = cplx(1.0, 1.0) + 0.5 * std::polar(1.0, 0.785398 * k);
        const cplx dx = (D(c + h) - D(c - h)) / (2 * h);
        const cplx dy = (D(c + cplx(0, h)) - D(c - cplx(0, h))) / cplx(0, 2 * h);
        CHECK(std::abs(dx - dy) / std::abs(dx) < 1e-4);
    }
}

TEST_CASE("duality invariant")
{
    const SteadyWave w = build_wave(shipped("default"));
    const auto r = duality_check(w, cplx(1, 1), 0.0, 200, 1e-8);
    CHECK(r.max_deviation < 1e-5);
    CHECK(r.y.size() == 200);
    CHECK(r.y.front() == -w.default_M());
    CHECK(r.y.back() == 0.0);
    // the pairing equals the neutral determinant up to kappa
    EvansOptions o;
    o.tol = 1e-8;
    const EvansResult e = evans_erpenbeck(w, cplx(1, 1), o);
    CHECK(rel(e.kappa * r.median, evans_neutral(w, cplx(1, 1), o).D) < 1e-5);

    // shrinks with the tolerance
    const std::vector<cplx> lambdas{{0.5, 0}, {1, 1}, {0.3, 2}, {2, -1}, {0.1, 0.5}};
    auto worst = [&](double tol) {
        double m = 0.0;
        for (cplx l : lambdas)
            m = std::max(m, duality_check(w, l, 0.0, 200, tol).max_deviation);
        return m;
    };
    const double loose = worst(1e-5), tight = worst(1e-8);
    CHECK(tight < loose);
    CHECK(worst(1e-9) < tight);

    CHECK_THROWS_AS(duality_check(w, cplx(-1, 0), 0.0, 10, 1e-8), DomainError);
}

TEST_CASE("zero sets coincide")
{
    const SteadyWave w = build_wave(shipped("unstable_ls"));
    EvansOptions o;
    o.tol = 1e-8;
    const cplx rn = newton_root(evans_map(w, Method::neutral, o), cplx(0.1, 0.9)).root;
    CHECK(std::abs(rn - reference_root) < 1e-7);
    for (Method m : {Method::erpenbeck, Method::lee_stewart}) {
        const cplx r = newton_root(evans_map(w, m, o), cplx(0.1, 0.9)).root;
        CHECK(std::abs(r - rn) < 1e-4);
    }
    // the conjugate is a root too
    CHECK(std::abs(newton_root(evans_map(w, Method::neutral, o), cplx(0.1, -0.9)).root - std::conj(rn)) < 1e-7);
}

TEST_CASE("unfactored methods need more mesh points at large |lambda|")
{
    const SteadyWave w = build_wave(shipped("default"));
    for (cplx lambda : {cplx(0.5, 20), cplx(2, 50), cplx(20, 0)}) {
        const auto n = evans_neutral(w, lambda).stats.mesh_points();
        CHECK(evans_erpenbeck(w, lambda).stats.mesh_points() > n);
        CHECK(evans_lee_stewart(w, lambda).stats.mesh_points() > n);
    }
}

TEST_CASE("errors")
{
    const SteadyWave w = build_wave(shipped("default"));
    for (Method m : all_methods) {
        CHECK_THROWS_AS(evaluate_evans(w, cplx(-0.5, 1), m), DomainError);
        CHECK_THROWS_AS(evaluate_evans(w, 0.0, m), DomainError);
    }
    CHECK_THROWS_AS(evans_erpenbeck(w, 500.0), Overflow);
    CHECK_THROWS_AS(evans_lee_stewart(w, 500.0), Overflow);
    // the factored method still evaluates there
    const EvansResult n = evans_neutral(w, 500.0);
    CHECK(std::isfinite(std::abs(n.D)));
    CHECK(n.growth < 1.0);
}

TEST_CASE("concurrent evaluation matches serial")
{
    const SteadyWave w = build_wave(shipped("unstable_ls"));
    const auto& ls = sample_lambdas();
    const auto par = evaluate_all(evans_map(w, Method::neutral), ls, 4);
    for (std::size_t i = 0; i < ls.size(); ++i)
        CHECK(par[i] == evans_neutral(w, ls[i]).D);
}
