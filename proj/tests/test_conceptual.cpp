// SPDX-License-Identifier: Apache-2.0
//
// rismm - link-level simulation and optimization for RIS-assisted mmWave downlinks
// ------------------------------------------------------------------------

#include "oracles.hpp"

#include <rismm/conceptual.hpp>

#include <doctest.h>

using namespace rismm;
using namespace rismm::conceptual;
using rismm::test::TestRng;
using rismm::test::uniform;

TEST_CASE("free-space snr by substitution")
{
    CHECK(snr_free_space(FreeSpaceLink(10.0, 1.0, 100.0, 1.0)) == doctest::Approx(1.0).epsilon(1e-15));

    const double s1 = snr_free_space(FreeSpaceLink(37.0, 0.3, 2.0, 0.1));
    const double s2 = snr_free_space(FreeSpaceLink(74.0, 0.3, 2.0, 0.1));
    CHECK(s1 / s2 == doctest::Approx(4.0).epsilon(1e-14));

    const double lambda = 0.01;
    const double c0 = lambda / (4.0 * pi);
    const double expected = c0 * c0 / (100.0 * 100.0) * 1e10;
    CHECK(snr_free_space(FreeSpaceLink(100.0, c0, 1e10, 1.0)) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("free-space link rejects invalid parameters")
{
    CHECK_THROWS_AS(FreeSpaceLink(0.0, 1.0, 1.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(FreeSpaceLink(1.0, 0.0, 1.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(FreeSpaceLink(1.0, 1.0, -1.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(FreeSpaceLink(1.0, 1.0, 1.0, 0.0), InvalidArgument);
}

TEST_CASE("two-ray approximation and exact sum")
{
    // |C0'| = 1 with unit gains
    const auto s = snr_two_ray(TwoRayGeometry(10.0, 1.0, 1.0, 1.0), 1e4, 1.0);
    CHECK(s.snr_approx == doctest::Approx(1.0).epsilon(1e-14));

    const auto a = snr_two_ray(TwoRayGeometry(500.0, 3.0, 1.5, 0.01), 1.0, 1.0);
    const auto b = snr_two_ray(TwoRayGeometry(1000.0, 3.0, 1.5, 0.01), 1.0, 1.0);
    CHECK(a.snr_approx / b.snr_approx == doctest::Approx(16.0).epsilon(1e-13));

    // far field: exact within 5 % of the approximation
    for (double d : {1e4, 3e4, 1e5})
    {
        const TwoRayGeometry g(d, 2.0, 1.0, 0.1);
        REQUIRE(g.far_field());
        const auto r = snr_two_ray(g, 1.0, 1.0);
        CHECK(r.far_field_valid);
        CHECK(std::abs(r.snr_exact - r.snr_approx) <= 0.05 * r.snr_approx);
    }

    const auto near = snr_two_ray(TwoRayGeometry(5.0, 2.0, 1.0, 0.005), 1.0, 1.0);
    CHECK_FALSE(near.far_field_valid);
}

TEST_CASE("two-path gain")
{
    auto gain = [](double r1, double d1, double f1, double r2, double d2, double f2)
    { return two_path_gain(ReflectedPath(r1, d1, f1), ReflectedPath(r2, d2, f2)); };

    CHECK(gain(1, 1, 0.4, 1, 1, 0.4).alpha == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(gain(1, 1, 0.0, 1, 1, pi).alpha == doctest::Approx(0.0));

    // complex-sum oracle
    const cdouble sum = std::polar(1.0, 0.0) + std::polar(0.25, pi / 2);
    const auto g = gain(1, 1, 0.0, 0.5, 2, pi / 2);
    CHECK(g.alpha == doctest::Approx(std::abs(sum)).epsilon(1e-14));
    CHECK(g.alpha == doctest::Approx(std::sqrt(1.0625)).epsilon(1e-14));
    CHECK(g.phase == doctest::Approx(std::arg(sum)).epsilon(1e-14));
}

TEST_CASE("two-path gain stays between destructive and constructive limits")
{
    TestRng rng(11);
    for (int i = 0; i < 2000; ++i)
    {
        const ReflectedPath p1(uniform(rng, 0.01, 1.0), uniform(rng, 1.0, 100.0), uniform(rng, -pi, pi));
        const ReflectedPath p2(uniform(rng, 0.01, 1.0), uniform(rng, 1.0, 100.0), uniform(rng, -pi, pi));
        const auto g = two_path_gain(p1, p2);
        const cdouble sum = std::polar(p1.ratio(), p1.phi()) + std::polar(p2.ratio(), p2.phi());
        CHECK(g.alpha == doctest::Approx(std::abs(sum)).epsilon(1e-12));
        CHECK(g.alpha >= std::abs(p1.ratio() - p2.ratio()) - 1e-15);
        CHECK(g.alpha <= p1.ratio() + p2.ratio() + 1e-15);
    }
}

TEST_CASE("snr cases")
{
    const LinkConstants k{1.0, 1.0, 1.0};
    const ReflectedPath p1(0.6, 1.0, 0.2), p2(0.8, 1.0, 1.3);
    CHECK(snr_case(SnrCase::mrc_rx, p1, p2, k) == doctest::Approx(1.0).epsilon(1e-15));

    const ReflectedPath q1(0.5, 2.0, 0.0), q2(0.25, 1.0, 2.0);
    CHECK(snr_case(SnrCase::tx_phase_only, q1, q2, k) == doctest::Approx(snr_case(SnrCase::tx_full_csi, q1, q2, k)));
    CHECK(snr_case(SnrCase::tx_phase_only, p1, p2, k) < snr_case(SnrCase::tx_full_csi, p1, p2, k));

    CHECK_THROWS_AS(snr_case(SnrCase::reflector_amp_phase, p1, p2, k), InvalidArgument);
    CHECK(snr_case(SnrCase::reflector_amp_phase, p1, p2, k, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("fading case equals the squared two-path gain")
{
    const LinkConstants k{0.5, 3.0, 0.2};
    const ReflectedPath p1(0.9, 10.0, 0.3), p2(0.4, 25.0, 2.2);
    const double alpha = two_path_gain(p1, p2).alpha;
    CHECK(snr_case(SnrCase::fading, p1, p2, k) == doctest::Approx(0.25 * 3.0 / 0.2 * alpha * alpha).epsilon(1e-14));
}

TEST_CASE("amplitude split matches a grid search")
{
    const LinkConstants k{1.0, 1.0, 1.0};
    const ReflectedPath p1(0.6, 1.0, 0.0), p2(0.8, 1.0, 0.0);
    double best = 0.0;
    // alpha on the budget circle, 400 angles
    for (double t : rismm::test::linspace(0.0, pi / 2, 400))
    {
        const double s = 0.6 * std::cos(t) + 0.8 * std::sin(t);
        best = std::max(best, s * s);
    }
    const double got = snr_case(SnrCase::reflector_amp_phase, p1, p2, k, 1.0);
    CHECK(got >= best - 1e-12);
    CHECK(rismm::test::rel_diff(got, best) < 1e-5);

    TestRng rng(5);
    for (int i = 0; i < 200; ++i)
    {
        const ReflectedPath a(uniform(rng, 0.05, 1.0), uniform(rng, 1.0, 5.0), 0.0);
        const ReflectedPath b(uniform(rng, 0.05, 1.0), uniform(rng, 1.0, 5.0), 0.0);
        const double budget = uniform(rng, 0.5, 3.0);
        double grid = 0.0;
        for (double t : rismm::test::linspace(0.0, pi / 2, 20001))
        {
            const double s = std::sqrt(budget) * (a.ratio() * std::cos(t) + b.ratio() * std::sin(t));
            grid = std::max(grid, s * s);
        }
        const double closed = snr_case(SnrCase::reflector_amp_phase, a, b, k, budget);
        CHECK(closed >= grid * (1.0 - 1e-12));
        CHECK(rismm::test::rel_diff(closed, grid) < 1e-6);
    }
}

TEST_CASE("case identities hold on random draws")
{
    TestRng rng(2024);
    for (int i = 0; i < 1000; ++i)
    {
        const LinkConstants k{uniform(rng, 0.1, 2.0), uniform(rng, 0.1, 10.0), uniform(rng, 0.01, 1.0)};
        const ReflectedPath p1(uniform(rng, 0.01, 1.0), uniform(rng, 1.0, 100.0), uniform(rng, -pi, pi));
        const ReflectedPath p2(uniform(rng, 0.01, 1.0), uniform(rng, 1.0, 100.0), uniform(rng, -pi, pi));
        const double mrc = snr_case(SnrCase::mrc_rx, p1, p2, k);
        const double full = snr_case(SnrCase::tx_full_csi, p1, p2, k);
        const double phase_tx = snr_case(SnrCase::tx_phase_only, p1, p2, k);
        const double refl = snr_case(SnrCase::reflector_phase, p1, p2, k);
        CHECK(rismm::test::rel_diff(mrc, full) < 1e-12);
        CHECK(rismm::test::rel_diff(refl, 2.0 * phase_tx) < 1e-12);
        CHECK(full >= phase_tx);
    }
}

TEST_CASE("case names round trip")
{
    for (auto c : all_snr_cases)
        CHECK(snr_case_from_string(to_string(c)) == c);
    CHECK_FALSE(snr_case_from_string("nope"));
}

TEST_CASE("reflected path invariants")
{
    CHECK_THROWS_AS(ReflectedPath(0.0, 1.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(ReflectedPath(1.5, 1.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(ReflectedPath(0.5, 0.0, 0.0), InvalidArgument);
    CHECK_NOTHROW(ReflectedPath(1.0, 1.0, 0.0));
}
