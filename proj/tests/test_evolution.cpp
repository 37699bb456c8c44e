#include "doctest.h"

#include "kgms/evolution.hpp"
#include "kgms/util.hpp"
#include "support/fixtures.hpp"

#include <cmath>

using namespace kgms;
using testsupport::ground_state;

TEST_SUITE_BEGIN("evolution");

namespace {

Grid3 small_grid()
{
    Grid3 g;
    g.n = {32, 32, 32};
    g.box = {25.6, 25.6, 25.6};
    return g;
}

// smooth random low-mode field, deterministic
FieldPair random_smooth_state(const Grid3& g, double amplitude, std::uint64_t seed)
{
    NoiseGen rng(seed);
    FieldPair v(g);
    // few random plane waves
    for (int w = 0; w < 6; ++w) {
        const double kx = 2 * M_PI / g.box[0] * std::floor(rng.uniform() * 3);
        const double ky = 2 * M_PI / g.box[1] * std::floor(rng.uniform() * 3);
        const double kz = 2 * M_PI / g.box[2] * std::floor(rng.uniform() * 3);
        const double ph = 2 * M_PI * rng.uniform();
        const double a1 = amplitude * rng.gaussian();
        const double a2 = amplitude * rng.gaussian();
        for (int i = 0; i < g.n[0]; ++i)
            for (int j = 0; j < g.n[1]; ++j)
                for (int k = 0; k < g.n[2]; ++k) {
                    const double arg = kx * g.coord(i, 0) + ky * g.coord(j, 1) +
                                       kz * g.coord(k, 2) + ph;
                    v.psi1[g.index(i, j, k)] += a1 * std::cos(arg);
                    v.psi2[g.index(i, j, k)] += a2 * std::sin(arg);
                }
    }
    return v;
}

double diff_norm(const FieldPair& a, const FieldPair& b)
{
    FieldPair d = a;
    axpy(d, -1.0, b);
    return l2_norm(d);
}

} // namespace

TEST_CASE("free flow: identity, dispersion period, isometries, group law")
{
    Grid3 g = small_grid();
    SpectralWorkspace ws(g);
    auto v = random_smooth_state(g, 0.7, 42);

    SUBCASE("t = 0 is the identity")
    {
        auto w = free_flow(ws, v, 0.0);
        CHECK(diff_norm(w, v) < 1e-13 * l2_norm(v));
    }

    SUBCASE("single Fourier mode returns after one dispersion period")
    {
        FieldPair mode(g);
        const double kx = 2 * M_PI / g.box[0] * 3.0;
        for (int i = 0; i < g.n[0]; ++i)
            for (int j = 0; j < g.n[1]; ++j)
                for (int k = 0; k < g.n[2]; ++k)
                    mode.psi1[g.index(i, j, k)] = std::cos(kx * g.coord(i, 0));
        const double omega = std::sqrt(1.0 + kx * kx);
        auto w = free_flow(ws, mode, 2.0 * M_PI / omega);
        CHECK(diff_norm(w, mode) < 1e-11 * l2_norm(mode));
    }

    SUBCASE("quadratic energy and H-norm conserved to roundoff")
    {
        const double e0 = quadratic_energy(ws, v);
        const double h0 = h_norm(ws, v);
        for (double t : {0.37, 2.0, 11.5}) {
            auto w = free_flow(ws, v, t);
            CHECK(quadratic_energy(ws, w) == doctest::Approx(e0).epsilon(1e-12));
            CHECK(h_norm(ws, w) == doctest::Approx(h0).epsilon(1e-12));
        }
    }

    SUBCASE("group property")
    {
        auto a = free_flow(ws, free_flow(ws, v, 0.7), 1.1);
        auto b = free_flow(ws, v, 1.8);
        CHECK(diff_norm(a, b) < 1e-12 * l2_norm(v));
    }
}

TEST_CASE("h_norm: multiplier definition on a unit-L2 single mode")
{
    Grid3 g = small_grid();
    SpectralWorkspace ws(g);
    FieldPair v(g);
    const double kx = 2 * M_PI / g.box[0] * 5.0;
    const double vol = g.box[0] * g.box[1] * g.box[2];
    const double amp = std::sqrt(2.0 / vol);  // ||cos||_{L2} = 1
    for (int i = 0; i < g.n[0]; ++i)
        for (int j = 0; j < g.n[1]; ++j)
            for (int k = 0; k < g.n[2]; ++k)
                v.psi1[g.index(i, j, k)] = amp * std::cos(kx * g.coord(i, 0));
    CHECK(h_norm(ws, v) == doctest::Approx(std::sqrt(1.0 + kx * kx)).epsilon(1e-12));

    FieldPair z(g);
    CHECK(h_norm(ws, z) == 0.0);
}

TEST_CASE("strang step: fixed point, order, small-amplitude limit")
{
    Grid3 g = small_grid();
    SpectralWorkspace ws(g);

    SUBCASE("zero state is a fixed point")
    {
        FieldPair z(g);
        step(ws, z, 0.02);
        CHECK(l2_norm(z) == 0.0);
    }

    SUBCASE("self-convergence at order 2")
    {
        auto v0 = random_smooth_state(g, 0.15, 7);
        const double T = 0.4;
        auto run = [&](double dt) {
            FieldPair v = v0;
            const long n = std::lround(T / dt);
            for (long s = 0; s < n; ++s)
                step(ws, v, dt);
            return v;
        };
        auto ref = run(0.005);
        const double e1 = diff_norm(run(0.04), ref);
        const double e2 = diff_norm(run(0.02), ref);
        const double order = std::log2(e1 / e2);
        CAPTURE(e1);
        CAPTURE(e2);
        CAPTURE(order);
        CHECK(order > 1.8);
        CHECK(order < 2.3);
    }

    SUBCASE("tiny amplitude agrees with the free flow")
    {
        auto v0 = random_smooth_state(g, 1.0, 21);
        scale(v0, 1e-4 / l2_norm(v0));
        FieldPair v = v0;
        const double dt = 0.01;
        for (int s = 0; s < 50; ++s)
            step(ws, v, dt);
        auto w = free_flow(ws, v0, 0.5);
        // F(u) = O(eps^3): difference well below eps^2 scale
        CHECK(diff_norm(v, w) < 1e-11);
    }

    SUBCASE("time reversibility without dealiasing")
    {
        auto v0 = random_smooth_state(g, 0.2, 33);
        FieldPair v = v0;
        for (int s = 0; s < 40; ++s)
            step(ws, v, 0.01, false);
        for (int s = 0; s < 40; ++s)
            step(ws, v, -0.01, false);
        CHECK(diff_norm(v, v0) < 1e-11 * std::max(1.0, l2_norm(v0)));
    }
}

TEST_CASE("evolve: static soliton, conservation, instability growth rate")
{
    const auto& q = ground_state().profile;
    Grid3 g;
    g.n = {64, 64, 64};
    g.box = {25.6, 25.6, 25.6};
    Evolver ev(g);
    auto Q0 = boosted_soliton(q, BoostParams::make({0, 0, 0}), g, {0, 0, 0});

    std::vector<double> ts, drifts;
    std::vector<StateObserver> obs{[&](double t, const FieldPair& st) {
        FieldPair d = st;
        axpy(d, -1.0, Q0);
        ts.push_back(t);
        drifts.push_back(h_norm(ev.workspace(), d));
    }};
    EvolveOptions opts;
    opts.dt = 0.01;
    opts.observer_dt = 0.25;
    EvolveStats stats;
    (void)ev.evolve(Q0, 6.0, opts, obs, &stats);

    // energy conserved by the splitting
    CAPTURE(stats.energy_initial);
    CAPTURE(stats.energy_final);
    CHECK(std::abs(stats.energy_final - stats.energy_initial) <
          1e-6 * std::abs(stats.energy_initial));

    // early drift tiny; late drift grows at the unstable rate (roundoff seed)
    for (std::size_t i = 0; i < ts.size(); ++i)
        if (ts[i] <= 2.0)
            CHECK(drifts[i] < 1e-3);
    std::vector<double> lt, ld;
    for (std::size_t i = 0; i < ts.size(); ++i)
        if (ts[i] >= 3.0 && drifts[i] > 0) {
            lt.push_back(ts[i]);
            ld.push_back(std::log(drifts[i]));
        }
    auto fit = fit_line(lt, ld);
    const double nu = std::sqrt(-testsupport::eigenpair().pair.lambda);
    CAPTURE(fit.slope);
    CAPTURE(nu);
    CHECK(std::abs(fit.slope - nu) / nu < 0.15);
}

TEST_CASE("evolve: boosted soliton tracks its translate")
{
    const auto& q = ground_state().profile;
    Grid3 g;
    g.n = {64, 64, 64};
    g.box = {25.6, 25.6, 25.6};
    Evolver ev(g);
    const Vec3 beta{0.3, 0, 0};
    auto v0 = boosted_soliton(q, BoostParams::make(beta), g, {-1.0, 0, 0});

    EvolveOptions opts;
    opts.dt = 0.01;
    opts.observer_dt = 1.0;
    double worst = 0.0;
    std::vector<StateObserver> obs{[&](double t, const FieldPair& st) {
        Vec3 c{-1.0 + beta[0] * t, 0, 0};
        auto target = boosted_soliton(q, BoostParams::make(beta), g, c);
        FieldPair d = st;
        axpy(d, -1.0, target);
        worst = std::max(worst, h_norm(ev.workspace(), d));
    }};
    EvolveStats stats;
    (void)ev.evolve(v0, 4.0, opts, obs, &stats);
    CAPTURE(worst);
    CHECK(worst < 1e-3);

    // momentum conservation along the run
    auto p0 = momentum(ev.workspace(), v0);
    auto v4 = ev.evolve(v0, 4.0, opts);
    auto p4 = momentum(ev.workspace(), v4);
    CHECK(std::abs(p4[0] - p0[0]) < 1e-6 * std::abs(p0[0]));
}

TEST_CASE("linearized evolve with zero potential reduces to the free flow")
{
    Grid3 g = small_grid();
    Evolver ev(g);
    auto u0 = random_smooth_state(g, 0.4, 5);

    RadialProfile zero;
    zero.r_mesh = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
    zero.values.assign(7, 0.0);
    zero.derivative_samples.assign(7, 0.0);
    zero.tail_amp = 0.0;
    zero.tail_rate = 1.0;

    ParamPath path(std::vector<Vec3>{{0, 0, 0}}, std::vector<Vec3>{{0.1, 0, 0}});
    EvolveOptions opts;
    opts.dt = 0.01;
    auto uT = ev.evolve_linearized(u0, path, zero, 1.0, opts);
    auto ref = free_flow(ev.workspace(), u0, 1.0);
    CHECK(diff_norm(uT, ref) < 1e-10 * l2_norm(u0));
}

TEST_CASE("evolve rejects dt violating the accuracy guard")
{
    Grid3 g = small_grid();
    Evolver ev(g);
    FieldPair v(g);
    EvolveOptions opts;
    opts.dt = 0.2; // omega_max ~ 6.9 at this grid: 0.2 * 6.9 > 0.5
    CHECK_THROWS_AS((void)ev.evolve(v, 1.0, opts), std::invalid_argument);
}

TEST_SUITE_END();
