#include "doctest.h"
#include "support.hpp"

#include "zndstab/stability.hpp"

#include <cmath>
#include <numbers>

using namespace zndstab;
using zndstab::testing::shipped;

namespace {

const cplx reference_root(0.12532684763489, 0.88535802318005);

} // namespace

TEST_CASE("synthetic winding counts")
{
    const cplx l0(0.5, 0.7);
    auto pair = [l0](cplx l) { return (l - l0) * (l - std::conj(l0)); };
    const WindingReport r = count_unstable(pair, 2.0);
    CHECK(r.winding == 2);
    CHECK(r.min_abs_D > 0.0);
    CHECK(r.n_samples == r.samples.size());
    CHECK(r.method == "custom");

    CHECK(count_unstable([](cplx) { return cplx(3.0, 1.0); }, 1.0).winding == 0);
    // a zero in the left half-plane is not counted
    CHECK(count_unstable([](cplx l) { return l + 0.5; }, 2.0).winding == 0);
    // model determinant has its only zero at the origin, outside the offset contour
    CHECK(count_unstable([](cplx l) { return l / (10.0 * (l + 2.0)); }, 4.0).winding == 0);
}

TEST_CASE("synthetic winding is monotone in the radius")
{
    const std::vector<cplx> zeros{{0.3, 0.2}, {0.3, -0.2}, {1.0, 2.0}, {1.0, -2.0}, {3.0, 0.5}};
    auto f = [&](cplx l) {
        cplx v = 1.0;
        for (cplx z : zeros)
            v *= l - z;
        return v;
    };
    int previous = 0;
    for (double R : {0.2, 0.5, 1.0, 2.5, 3.5, 5.0}) {
        const int w = count_unstable(f, R).winding;
        CHECK(w >= previous);
        previous = w;
    }
    CHECK(previous == 5);
}

TEST_CASE("contour through a root is reported")
{
    // zero placed exactly on one of the initial nodes
    const cplx on = Contour::semicircle(2.0, 2e-4, 32).nodes()[13];
    CHECK_THROWS_AS(count_unstable([on](cplx l) { return l - on; }, 2.0), ContourThroughRoot);
    // a zero on Re = 0 is excluded by the axis offset
    auto f = [](cplx l) { return l - cplx(0.0, 1.0); };
    CHECK(count_unstable(f, 2.0).winding == 0);
    CHECK_THROWS_AS(count_unstable(f, -1.0), DomainError);
}

TEST_CASE("ZND winding counts")
{
    const SteadyWave unstable = build_wave(shipped("unstable_ls"));
    const SteadyWave stable = build_wave(shipped("default"));
    const SteadyWave inert = build_wave(shipped("nonreactive"));
    for (Method m : {Method::neutral, Method::erpenbeck, Method::lee_stewart}) {
        CHECK(count_unstable(unstable, 3.0, m).winding == 2);
        CHECK(count_unstable(stable, 2.0, m).winding == 0);
    }
    CHECK(count_unstable(inert, 2.0, Method::neutral).winding == 0);

    // radius monotonicity across the known pair at |lambda| ~ 0.894
    CHECK(count_unstable(unstable, 0.5, Method::neutral).winding == 0);
    CHECK(count_unstable(unstable, 1.2, Method::neutral).winding == 2);

    // refinement beyond the threshold does not change the count
    CountOptions fine;
    fine.initial_nodes = 128;
    fine.max_phase_step = std::numbers::pi / 16;
    const WindingReport r = count_unstable(unstable, 3.0, Method::neutral, {}, fine);
    CHECK(r.winding == 2);
    CHECK(r.n_samples > count_unstable(unstable, 3.0, Method::neutral).n_samples);
}

TEST_CASE("sweep_roots on synthetic families")
{
    auto shift = [](double a) -> ComplexMap { return [a](cplx l) { return l - a; }; };
    std::vector<double> values;
    for (int i = 0; i <= 10; ++i)
        values.push_back(1.0 + 0.1 * i);
    const RootTrace t = sweep_roots(shift, "a", values, 1.05);
    REQUIRE(t.complete);
    REQUIRE(t.roots.size() == values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        CHECK(std::abs(t.roots[i] - values[i]) < 1e-12);
        CHECK(t.converged[i]);
    }

    auto fixed = [](double) -> ComplexMap { return [](cplx l) { return l * l + 1.0; }; };
    const RootTrace c = sweep_roots(fixed, "none", {0.0, 1.0, 2.0}, cplx(0.1, 0.9));
    for (cplx r : c.roots)
        CHECK(std::abs(r - cplx(0, 1)) < 1e-12);

    // large parameter steps are subdivided
    auto fast = [](double a) -> ComplexMap { return [a](cplx l) { return l - cplx(1.0, 3.0 * a); }; };
    const RootTrace s = sweep_roots(fast, "a", {0.0, 1.0}, cplx(1.0, 0.0));
    CHECK(s.complete);
    CHECK(std::abs(s.roots.back() - cplx(1.0, 3.0)) < 1e-12);

    // a root leaving the right half-plane stops the trace with the last good value
    auto exit = [](double a) -> ComplexMap { return [a](cplx l) { return l - cplx(1.0 - a, 0.5); }; };
    const RootTrace e = sweep_roots(exit, "a", {0.0, 0.5, 1.5}, cplx(1.0, 0.5));
    CHECK_FALSE(e.complete);
    CHECK(e.last_good >= 0.5);
    CHECK(e.last_good <= 1.0 + 1e-12);
    CHECK_FALSE(e.message.empty());
}

TEST_CASE("set_parameter")
{
    GasWaveConfig c = shipped("default");
    set_parameter(c, "EA", 77.0);
    CHECK(c.EA == 77.0);
    set_parameter(c, "upstream.u", -10.0);
    CHECK(c.upstream.u == -10.0);
    set_parameter(c, "K", 3.0);
    CHECK(c.K(0, 0) == 3.0);
    CHECK_THROWS_AS(set_parameter(c, "gamma", 1.0), ConfigError);
}

TEST_CASE("ZND root following")
{
    const GasWaveConfig base = shipped("unstable_ls");
    EvansOptions evans;
    evans.tol = 1e-8;
    const std::vector<double> down{300.0, 297.5, 295.0, 292.5, 290.0};
    const RootTrace t = sweep_znd_roots(base, "EA", down, cplx(0.1, 0.9), Method::neutral, evans);
    REQUIRE(t.complete);
    REQUIRE(t.roots.size() == down.size());
    CHECK(std::abs(t.roots.front() - reference_root) < 1e-7);

    for (std::size_t k = 0; k < down.size(); ++k) {
        GasWaveConfig cfg = base;
        cfg.EA = down[k];
        const SteadyWave w = build_wave(cfg);
        const ComplexMap D = evans_map(w, Method::neutral, evans);
        CHECK(std::abs(D(t.roots[k])) < 1e-6 * std::abs(D(t.roots[k] + 0.1)));
        if (k > 0)
            CHECK(std::abs(t.roots[k] - t.roots[k - 1]) < SweepOptions{}.max_jump);
    }
    // lower activation energy is more stable: the growth rate drops
    CHECK(t.roots.back().real() < t.roots.front().real());

    std::vector<double> up(down.rbegin(), down.rend());
    const RootTrace back = sweep_znd_roots(base, "EA", up, t.roots.back(), Method::neutral, evans);
    REQUIRE(back.complete);
    CHECK(std::abs(back.roots.back() - t.roots.front()) < 1e-6);
}
