#include "doctest.h"

#include "kgms/geometry.hpp"
#include "support/fixtures.hpp"

#include <cmath>
#include <random>

using namespace kgms;
using testsupport::ground_state;

TEST_SUITE_BEGIN("geometry");

TEST_CASE("lorentz gamma")
{
    CHECK(lorentz_gamma({0, 0, 0}) == 1.0);
    CHECK(lorentz_gamma({0.6, 0, 0}) == doctest::Approx(1.25).epsilon(1e-14));
    CHECK(lorentz_gamma({0, 0.36, 0.48}) == doctest::Approx(1.25).epsilon(1e-14));
    CHECK(lorentz_gamma({0.999999, 0, 0}) > 500.0);
    CHECK_THROWS_AS((void)lorentz_gamma({1.0, 0, 0}), std::domain_error);
    CHECK_THROWS_AS((void)lorentz_gamma({0.8, 0.8, 0}), std::domain_error);

    std::mt19937_64 eng(7);
    std::uniform_real_distribution<double> d(-0.5, 0.5);
    for (int i = 0; i < 50; ++i) {
        Vec3 b{d(eng), d(eng), d(eng)};
        const double g = lorentz_gamma(b);
        CHECK(g >= 1.0);
        CHECK(g * std::sqrt(1.0 - dot(b, b)) == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("boost_point: axis scaling, identity, linearity, volume factor")
{
    auto bp = BoostParams::make({0.6, 0, 0});
    Vec3 perp{0, 1.5, -2.0};
    auto p2 = bp.boost_point(perp);
    CHECK(p2[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(p2[1] == doctest::Approx(1.5));
    CHECK(p2[2] == doctest::Approx(-2.0));
    auto p3 = bp.boost_point({2.0, 0, 0});
    CHECK(p3[0] == doctest::Approx(2.5).epsilon(1e-14));
    auto id = BoostParams::make({0, 0, 0});
    auto p4 = id.boost_point({1.0, 2.0, 3.0});
    CHECK(p4[0] == 1.0);
    CHECK(p4[1] == 2.0);
    CHECK(p4[2] == 3.0);

    std::mt19937_64 eng(11);
    std::uniform_real_distribution<double> d(-2, 2);
    auto bq = BoostParams::make({0.3, -0.2, 0.45});
    for (int i = 0; i < 40; ++i) {
        Vec3 x{d(eng), d(eng), d(eng)}, y{d(eng), d(eng), d(eng)};
        const double c = d(eng);
        Vec3 lin{c * x[0] + y[0], c * x[1] + y[1], c * x[2] + y[2]};
        auto lhs = bq.boost_point(lin);
        auto bx = bq.boost_point(x), by = bq.boost_point(y);
        for (int k = 0; k < 3; ++k)
            CHECK(lhs[k] == doctest::Approx(c * bx[k] + by[k]).epsilon(1e-12));
    }

    {
        auto b = BoostParams::make({0.31, 0.12, -0.4});
        Vec3 c0 = b.boost_point({1, 0, 0});
        Vec3 c1 = b.boost_point({0, 1, 0});
        Vec3 c2 = b.boost_point({0, 0, 1});
        const double det = c0[0] * (c1[1] * c2[2] - c1[2] * c2[1]) -
                           c1[0] * (c0[1] * c2[2] - c0[2] * c2[1]) +
                           c2[0] * (c0[1] * c1[2] - c0[2] * c1[1]);
        CHECK(det == doctest::Approx(b.gamma).epsilon(1e-12));
    }
}

TEST_CASE("boosted soliton at beta=0 reproduces the radial profile")
{
    const auto& q = ground_state().profile;
    Grid3 g;
    g.n = {32, 32, 32};
    g.box = {25.6, 25.6, 25.6};
    const Vec3 c{0.8, -1.6, 0.0};
    auto fp = boosted_soliton(q, BoostParams::make({0, 0, 0}), g, c);
    double worst = 0.0;
    for (int i = 0; i < g.n[0]; ++i)
        for (int j = 0; j < g.n[1]; ++j)
            for (int k = 0; k < g.n[2]; ++k) {
                const Vec3 x{g.coord(i, 0), g.coord(j, 1), g.coord(k, 2)};
                Vec3 dd{g.wrap(x[0] - c[0], 0), g.wrap(x[1] - c[1], 1), g.wrap(x[2] - c[2], 2)};
                const double expect = q.evaluate(norm(dd));
                worst = std::max(worst, std::abs(fp.psi1[g.index(i, j, k)] - expect));
                CHECK(fp.psi2[g.index(i, j, k)] == 0.0);
            }
    CHECK(worst < 1e-6);
}

TEST_CASE("traveling-wave equation residual, spectral, with refinement order")
{
    const auto& q = ground_state().profile;
    const Vec3 c{0, 0, 0};
    auto bp = BoostParams::make({0.3, 0, 0});

    Grid3 coarse;
    coarse.n = {64, 64, 64};
    coarse.box = {19.2, 19.2, 19.2};
    Grid3 fine;
    fine.n = {128, 128, 128};
    fine.box = {19.2, 19.2, 19.2};

    auto rc = vec_q_eq_residual(q, bp, coarse, c);
    auto rf = vec_q_eq_residual(q, bp, fine, c);
    CAPTURE(rc.rel_l2);
    CAPTURE(rf.rel_l2);
    // the core radius is ~0.4 (nu ~ 3.9), so spectral accuracy needs dx <~ 0.15
    CHECK(rf.rel_l2 < 1e-3);
    CHECK(rc.rel_l2 / rf.rel_l2 > 4.0);
}

TEST_CASE("kernel identities: translation and boost-derivative directions")
{
    const auto& q = ground_state().profile;
    Grid3 g;
    g.n = {64, 64, 64};
    g.box = {19.2, 19.2, 19.2};
    const Vec3 c{0, 0, 0};

    SUBCASE("beta = 0 reduces to the radial zero mode")
    {
        auto rep = kernel_identity_check(q, BoostParams::make({0, 0, 0}), g, c, 0);
        CAPTURE(rep.res_translation);
        CHECK(rep.res_translation < 1e-4);
    }

    SUBCASE("moderate boost: both identities hold discretely")
    {
        auto bp = BoostParams::make({0.3, 0, 0});
        auto rep = kernel_identity_check(q, bp, g, c, 0, 1e-3);
        CAPTURE(rep.res_translation);
        CAPTURE(rep.res_boost);
        CAPTURE(rep.res_boost_flipped);
        CHECK(rep.res_translation < 1e-3);
        CHECK(rep.res_boost < 1e-3);
        CHECK(rep.res_boost_flipped > 100.0 * rep.res_boost);

        auto rep_t = kernel_identity_check(q, bp, g, c, 1, 1e-3);
        CHECK(rep_t.res_translation < 1e-3);
        CHECK(rep_t.res_boost < 1e-3);
    }

    SUBCASE("beta finite-difference step halving decreases the residual at order 2")
    {
        auto bp = BoostParams::make({0.3, 0, 0});
        auto r4 = kernel_identity_check(q, bp, g, c, 0, 8e-3);
        auto r2 = kernel_identity_check(q, bp, g, c, 0, 4e-3);
        CAPTURE(r4.res_boost);
        CAPTURE(r2.res_boost);
        CHECK(r4.res_boost / r2.res_boost > 3.0);
    }
}

TEST_CASE("boost anisotropy: half-width contraction by 1/gamma")
{
    const auto& q = ground_state().profile;
    Grid3 g;
    g.n = {128, 128, 128};
    g.box = {19.2, 19.2, 19.2};
    auto bp = BoostParams::make({0.6, 0, 0});
    auto fp = boosted_soliton(q, bp, g, {0, 0, 0});

    const double half = 0.5 * q.values[0];
    auto crossing = [&](int axis) {
        const int n = g.n[axis];
        double prev = 0.0, prev_val = 0.0;
        for (int i = n / 2; i < n; ++i) {
            int ii[3] = {g.n[0] / 2, g.n[1] / 2, g.n[2] / 2};
            ii[axis] = i;
            const double val = fp.psi1[g.index(ii[0], ii[1], ii[2])];
            const double x = g.coord(i, axis);
            if (val < half && i > n / 2)
                return prev + (half - prev_val) * (x - prev) / (val - prev_val);
            prev = x;
            prev_val = val;
        }
        return -1.0;
    };
    const double wx = crossing(0);
    const double wy = crossing(1);
    REQUIRE(wx > 0.0);
    REQUIRE(wy > 0.0);
    CHECK(wx / wy == doctest::Approx(1.0 / bp.gamma).epsilon(0.02));
}

TEST_SUITE_END();
