#include "doctest.h"

#include "kgms/radial.hpp"
#include "kgms/util.hpp"
#include "support/collocation_oracle.hpp"

#include <cmath>
#include <random>

using namespace kgms;

namespace {
const GroundStateResult& ground_state()
{
    static GroundStateResult gs = solve_ground_state(1e-10, 20.0);
    return gs;
}
} // namespace

TEST_SUITE_BEGIN("radial");

TEST_CASE("ground state: shape, symmetry and bracket")
{
    const auto& gs = ground_state();
    const auto& p = gs.profile;

    CHECK(p.r_mesh.front() == 0.0);
    CHECK(p.derivative_samples.front() == 0.0);

    for (std::size_t i = 0; i + 1 < p.values.size(); ++i) {
        CHECK(p.values[i] > 0.0);
        CHECK(p.values[i + 1] < p.values[i]);
    }

    // bracket history: monotone shrinkage, final width below tolerance
    const auto& h = gs.bracket_history;
    REQUIRE(h.size() > 10);
    for (std::size_t i = 1; i < h.size(); ++i) {
        CHECK(h[i].lo >= h[i - 1].lo);
        CHECK(h[i].hi <= h[i - 1].hi);
    }
    CHECK(h.back().hi - h.back().lo < 1e-10);
}

TEST_CASE("ground state: center value against Chebyshev collocation oracle")
{
    const auto& gs = ground_state();
    auto oracle = testsupport::chebyshev_ground_state(140, 14.0);
    CAPTURE(oracle.center_value);
    CAPTURE(oracle.final_residual);
    REQUIRE(oracle.final_residual < 1e-9);
    CHECK(std::abs(gs.center_value - oracle.center_value) / oracle.center_value < 1e-6);
    // frozen from the oracle run (agrees with bisection to ~1e-9)
    CHECK(std::abs(gs.center_value - 4.337387680) / 4.337387680 < 1e-6);
}

TEST_CASE("ground state: ODE residual on the mesh")
{
    const auto& gs = ground_state();
    const double sup = ground_state_residual_sup(gs.profile);
    CAPTURE(sup);
    CHECK(sup < 1e-8);
}

TEST_CASE("ground state: exponential tail with rate 1")
{
    const auto& p = ground_state().profile;
    // linear fit of log(r Q) on [r_max-5, r_max]
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < p.r_mesh.size(); ++i)
        if (p.r_mesh[i] >= p.r_max() - 5.0) {
            xs.push_back(p.r_mesh[i]);
            ys.push_back(std::log(p.r_mesh[i] * p.values[i]));
        }
    auto f = fit_line(xs, ys);
    CHECK(std::abs(-f.slope - 1.0) < 0.01);
    CHECK(p.tail_rate == doctest::Approx(1.0).epsilon(0.01));
    // stored tail is consistent with the last mesh value
    const double tail_at_end = p.tail_amp * std::exp(-p.tail_rate * p.r_max()) / p.r_max();
    CHECK(std::abs(p.values.back() - tail_at_end) / p.values.back() < 1e-3);
}

TEST_CASE("evaluate_profile: interpolation and tail extension")
{
    const auto& p = ground_state().profile;
    // identity at a mesh node
    CHECK(evaluate_profile(p, 0.0) == p.values[0]);

    // monotonicity on random pairs
    std::mt19937_64 eng(12345);
    std::uniform_real_distribution<double> dist(0.0, p.r_max());
    for (int k = 0; k < 1000; ++k) {
        double r1 = dist(eng), r2 = dist(eng);
        if (r1 > r2) std::swap(r1, r2);
        if (r2 - r1 < 1e-9) continue;
        CHECK(evaluate_profile(p, r1) > evaluate_profile(p, r2));
    }

    // beyond-mesh value against a longer re-solve
    auto gs_long = solve_ground_state(1e-10, 30.0);
    const double v_tail = evaluate_profile(p, 25.0);
    const double v_ref = evaluate_profile(gs_long.profile, 25.0);
    CHECK(std::abs(v_tail - v_ref) / v_ref < 0.05);
}

TEST_CASE("ground state energy: Pohozaev consistency and mesh stability")
{
    const auto& p = ground_state().profile;
    const double e = ground_state_energy(p);
    CHECK(e > 0.0);

    // zero profile
    RadialProfile z = p;
    for (auto& v : z.values) v = 0.0;
    for (auto& v : z.derivative_samples) v = 0.0;
    z.tail_amp = 0.0;
    CHECK(ground_state_energy(z) == 0.0);

    // multiply the ODE by Q and integrate: int |grad Q|^2 + Q^2 = int Q^4,
    // so E = (1/4) int Q^4
    std::vector<double> q4(p.values.size());
    for (std::size_t i = 0; i < q4.size(); ++i)
        q4[i] = p.values[i] * p.values[i];
    const double int_q4 = radial_inner(p.r_mesh, q4, q4);
    CHECK(std::abs(e - 0.25 * int_q4) / e < 1e-6);

    // stability under mesh refinement
    auto gs_fine = solve_ground_state(1e-10, 20.0, 0.01);
    const double e_fine = ground_state_energy(gs_fine.profile);
    CHECK(std::abs(e - e_fine) / e < 1e-6);
}

TEST_CASE("negative eigenpair: uniqueness, cross-validation, positivity")
{
    const auto& gs = ground_state();
    auto s = solve_negative_eigenpair(gs.profile, 1e-6);

    CHECK(s.negative_count == 1);
    CHECK(s.pair.lambda < 0.0);
    CAPTURE(s.lambda_matrix);
    CAPTURE(s.lambda_shooting);
    CHECK(std::abs(s.lambda_matrix - s.lambda_shooting) / std::abs(s.lambda_matrix) < 1e-5);

    // eigenfunction strictly positive on its mesh
    for (double v : s.pair.profile.values)
        CHECK(v > 0.0);

    // normalized in the 3D radial measure
    const double nrm = radial_inner(s.pair.profile.r_mesh, s.pair.profile.values,
                                    s.pair.profile.values);
    CHECK(nrm == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(s.pair.l_sector == 0);

    CAPTURE(s.residual);
    CHECK(s.residual < 1e-4);

    // Rayleigh quotient reproduces lambda: <phi, L phi> = lambda + O(residual)
    // (independent reconstruction via profile derivatives)
    {
        const auto& pm = s.pair.profile.r_mesh;
        std::vector<double> lphi(pm.size(), 0.0), phi(s.pair.profile.values);
        for (std::size_t i = 1; i + 1 < pm.size(); ++i) {
            const double r = pm[i];
            const double d2 = s.pair.profile.evaluate_deriv2(r);
            const double d1 = s.pair.profile.evaluate_deriv(r);
            const double Q = evaluate_profile(gs.profile, r);
            lphi[i] = -d2 - 2.0 / r * d1 + (1.0 - 3.0 * Q * Q) * phi[i];
        }
        const double ray = radial_inner(pm, phi, lphi);
        CHECK(std::abs(ray - s.pair.lambda) < 2e-3 * std::abs(s.pair.lambda));
    }
}

TEST_CASE("zero mode: l=1 residual and convergence order")
{
    const auto& gs = ground_state();
    auto rep = verify_zero_mode(gs.profile, 1e-6);
    CAPTURE(rep.residual_rel_l2);
    CHECK(rep.residual_rel_l2 < 1e-6);
    CHECK(std::abs(rep.eigenvalue_estimate) < 1e-6);

    // trivial: operator applied to the zero function vanishes identically
    RadialProfile z = gs.profile;
    for (auto& v : z.derivative_samples) v = 0.0;
    auto rep0 = verify_zero_mode(z, 1e-6);
    CHECK(rep0.residual_sup == 0.0);

    // residual decreases at the stencil order under mesh doubling
    auto gs_coarse = solve_ground_state(1e-10, 20.0, 0.04);
    auto rep_coarse = verify_zero_mode(gs_coarse.profile, 1e-6);
    const double ratio = rep_coarse.residual_rel_l2 / rep.residual_rel_l2;
    CAPTURE(ratio);
    CHECK(ratio > std::pow(2.0, 4));
}

TEST_CASE("gap scan: clean spectrum in (0,1) for l <= 2")
{
    const auto& gs = ground_state();
    auto scan = gap_scan(gs.profile, 2);
    CHECK(scan.nu2 > 0.0);
    for (const auto& ge : scan.found) {
        if (!ge.resolution_stable)
            continue;
        if (ge.l == 1) {
            CHECK(ge.is_zero_mode); // only the translation mode
        } else {
            // no stable eigenvalue may appear in (0, 1)
            CHECK(ge.lambda <= 0.0);
        }
    }
    // l=1 zero mode must actually be found
    bool found_zero = false;
    for (const auto& ge : scan.found)
        if (ge.l == 1 && ge.is_zero_mode)
            found_zero = true;
    CHECK(found_zero);
}

TEST_CASE("preconditions are enforced")
{
    CHECK_THROWS_AS((void)solve_ground_state(1e-30, 20.0), std::invalid_argument);
    CHECK_THROWS_AS((void)solve_ground_state(1e-10, 10.0), std::invalid_argument);
    const auto& p = ground_state().profile;
    CHECK_THROWS_AS((void)p.evaluate(-1.0), std::domain_error);
}

TEST_SUITE_END();
