// SPDX-License-Identifier: Apache-2.0
//
// rismm - link-level simulation and optimization for RIS-assisted mmWave downlinks
// ------------------------------------------------------------------------

#include "oracles.hpp"

#include <rismm/ris.hpp>

#include <doctest.h>

using namespace rismm;
using namespace rismm::test;

namespace
{
    LinkSet random_links(TestRng &rng, int v, int n, int m)
    {
        LinkSet ls;
        ls.h0 = random_cmatrix(rng, v, m);
        ls.h1 = random_cmatrix(rng, n, m);
        ls.h2 = random_cmatrix(rng, v, n);
        return ls;
    }
}

TEST_CASE("reflection matrix construction")
{
    const std::vector<double> ph{0.1, -2.0, 3.0};
    const auto p = ReflectionMatrix::passive(ph);
    CHECK(p.kind() == ReflectionKind::passive_diagonal);
    CHECK(p.size() == 3);
    CHECK(p.frobenius_norm2() == doctest::Approx(3.0).epsilon(1e-14));
    for (std::size_t i = 0; i < ph.size(); ++i)
        CHECK(std::abs(p.diagonal()[static_cast<Eigen::Index>(i)] - phasor(ph[i])) < 1e-15);

    CVector bad(2);
    bad << cdouble(1.0, 0.0), cdouble(0.5, 0.0);
    CHECK_THROWS_AS(ReflectionMatrix::passive_from_phasors(bad), InvalidArgument);

    CVector zero_gain(2);
    zero_gain << cdouble(1.0, 0.0), cdouble(0.0, 0.0);
    CHECK_THROWS_AS(ReflectionMatrix::active(zero_gain), InvalidArgument);
    CHECK(ReflectionMatrix::active(bad, 5.0).kind() == ReflectionKind::active_diagonal);

    const auto g = ReflectionMatrix::general(CMatrix::Ones(2, 2));
    CHECK_FALSE(g.is_diagonal());
    CHECK_THROWS(g.diagonal());
}

TEST_CASE("composite channel")
{
    TestRng rng(1);
    auto ls = random_links(rng, 2, 5, 3);

    const auto zero = ReflectionMatrix::general(CMatrix::Zero(5, 5));
    CHECK((composite_channel(ls, zero) - ls.h0).norm() < 1e-14);

    LinkSet id;
    id.h1 = random_cmatrix(rng, 3, 4);
    id.h2 = CMatrix::Identity(3, 3);
    id.h0 = CMatrix::Zero(3, 4);
    CHECK((composite_channel(id, ReflectionMatrix::identity(3)) - id.h1).norm() < 1e-14);

    const auto phases = random_phases(rng, 5);
    const auto psi = ReflectionMatrix::passive(phases);
    const CMatrix expected = ls.h0 + naive_diag_product(ls.h2, psi.diagonal(), ls.h1);
    CHECK(max_abs(composite_channel(ls, psi) - expected) < 1e-12);

    // general kind follows the plain matrix product
    const CMatrix full = random_cmatrix(rng, 5, 5);
    const CMatrix expected_g = ls.h0 + naive_product(naive_product(ls.h2, full), ls.h1);
    CHECK(max_abs(composite_channel(ls, ReflectionMatrix::general(full)) - expected_g) < 1e-12);

    // linear in psi
    const CMatrix a = random_cmatrix(rng, 5, 5), b = random_cmatrix(rng, 5, 5);
    LinkSet no_direct = ls;
    no_direct.h0.setZero();
    const CMatrix lhs = composite_channel(no_direct, ReflectionMatrix::general(2.0 * a + b));
    const CMatrix rhs = 2.0 * composite_channel(no_direct, ReflectionMatrix::general(a)) +
                        composite_channel(no_direct, ReflectionMatrix::general(b));
    CHECK(max_abs(lhs - rhs) < 1e-12);

    LinkSet wrong = ls;
    wrong.h2 = random_cmatrix(rng, 2, 4);
    CHECK_THROWS_AS(composite_channel(wrong, psi), InvalidArgument);
}

TEST_CASE("coherent RPL-only phases give N |h1| |h2|")
{
    TestRng rng(2);
    for (int n : {1, 4, 8, 17})
    {
        const double m1 = uniform(rng, 0.1, 2.0), m2 = uniform(rng, 0.1, 2.0);
        const auto t = random_phases(rng, n), r = random_phases(rng, n);
        const auto psi = coherent_phases_rpl_only(t, r);
        cdouble s = 0.0;
        for (int i = 0; i < n; ++i)
            s += m2 * phasor(r[i]) * psi.diagonal()[i] * m1 * phasor(t[i]);
        CHECK(std::abs(s) == doctest::Approx(n * m1 * m2).epsilon(1e-12));
    }

    auto snr = [](int n)
    {
        const std::vector<double> zeros(static_cast<std::size_t>(n), 0.0);
        const auto psi = coherent_phases_rpl_only(zeros, zeros);
        const double g = std::abs(psi.diagonal().sum());
        return g * g;
    };
    CHECK(snr(4) == doctest::Approx(16.0));
    CHECK(snr(8) / snr(4) == doctest::Approx(4.0));
}

TEST_CASE("coherent phases beat random phases")
{
    TestRng rng(3);
    const int n = 6;
    const auto t = random_phases(rng, n), r = random_phases(rng, n);
    auto gain = [&](const CVector &d)
    {
        cdouble s = 0.0;
        for (int i = 0; i < n; ++i)
            s += phasor(r[i]) * d[i] * phasor(t[i]);
        return std::abs(s);
    };
    const double best = gain(coherent_phases_rpl_only(t, r).diagonal());
    for (int i = 0; i < 1000; ++i)
        CHECK(gain(ReflectionMatrix::passive(random_phases(rng, n)).diagonal()) <= best + 1e-12);
}

TEST_CASE("coherent phases with a direct path")
{
    const std::vector<double> zeros(3, 0.0);
    const auto psi = coherent_phases_with_dpl(0.0, zeros, zeros);
    const double g = 1.0 + std::abs(psi.diagonal().sum());
    CHECK(g * g == doctest::Approx(16.0));

    TestRng rng(4);
    const int n = 7;
    const double h0 = 0.8, m1 = 0.6, m2 = 1.3, phi0 = 0.9;
    const auto t = random_phases(rng, n), r = random_phases(rng, n);
    const auto p = coherent_phases_with_dpl(phi0, t, r);
    cdouble s = h0 * phasor(phi0);
    for (int i = 0; i < n; ++i)
        s += m2 * phasor(r[i]) * p.diagonal()[i] * m1 * phasor(t[i]);
    CHECK(std::norm(s) == doctest::Approx(std::pow(h0 + m1 * m2 * n, 2)).epsilon(1e-12));
}

TEST_CASE("coherent phases given a beam")
{
    const int n = 4, m = 3;
    CVector h2 = CVector::Constant(n, 0.5);
    CMatrix h1 = CMatrix::Constant(n, m, 0.25);
    CVector f = CVector::Constant(m, 1.0 / std::sqrt(3.0));
    const auto real = coherent_phases_given_beam(h2, h1, f);
    for (double p : real.psi.phases())
        CHECK(std::abs(p) < 1e-15);
    CHECK(real.b == doctest::Approx(n * 0.5 * 0.25 * 3.0 / std::sqrt(3.0)));

    TestRng rng(5);
    h2 = random_cvector(rng, 8);
    h1 = random_cmatrix(rng, 8, 5);
    f = random_unit_vector(rng, 5);
    const auto c = coherent_phases_given_beam(h2, h1, f);
    const cdouble achieved = h2.transpose() * c.psi.diagonal().asDiagonal() * h1 * f;
    CHECK(std::abs(achieved) == doctest::Approx(c.b).epsilon(1e-12));
    CHECK(std::abs(achieved.imag()) < 1e-10);
    CHECK(achieved.real() > 0.0);
    CHECK(c.undefined_elements.empty());

    for (int i = 0; i < 1000; ++i)
    {
        const CVector d = ReflectionMatrix::passive(random_phases(rng, 8)).diagonal();
        const cdouble other = h2.transpose() * d.asDiagonal() * h1 * f;
        CHECK(std::abs(other) <= c.b + 1e-12);
    }

    // global rotation of f leaves b unchanged
    const auto rotated = coherent_phases_given_beam(h2, h1, f * phasor(1.234));
    CHECK(rotated.b == doctest::Approx(c.b).epsilon(1e-13));

    // a zero element is flagged and set to phase 0
    h2[3] = 0.0;
    const auto z = coherent_phases_given_beam(h2, h1, f);
    REQUIRE(z.undefined_elements.size() == 1);
    CHECK(z.undefined_elements[0] == 3);
    CHECK(std::abs(z.psi.phases()[3]) < 1e-15);

    CHECK_THROWS_AS(coherent_phases_given_beam(h2, h1, 2.0 * f), InvalidArgument);
}

TEST_CASE("average combining")
{
    TestRng rng(6);
    const auto one = ReflectionMatrix::passive(random_phases(rng, 5));
    const auto same = combine_psi_average({one}, CombineMode::passive());
    CHECK((same.diagonal() - one.diagonal()).norm() == 0.0);

    // three UEs on one element
    std::vector<ReflectionMatrix> three;
    for (double ph : {pi / 6, pi / 3, pi / 2})
        three.push_back(ReflectionMatrix::passive(std::vector<double>{ph}));
    const CVector sum = phasor_sum(three);
    CHECK(std::abs(sum[0]) == doctest::Approx(1.0 + std::sqrt(3.0)).epsilon(1e-14));
    CHECK(std::abs(std::abs(sum[0]) - 2.73) < 0.01);
    const auto combined = combine_psi_average(three, CombineMode::passive());
    CHECK(combined.phases()[0] == doctest::Approx(pi / 3).epsilon(1e-14));

    for (int trial = 0; trial < 50; ++trial)
    {
        std::vector<ReflectionMatrix> two{ReflectionMatrix::passive(random_phases(rng, 9)),
                                          ReflectionMatrix::passive(random_phases(rng, 9))};
        const auto c = combine_psi_average(two, CombineMode::passive());
        CHECK(c.kind() == ReflectionKind::passive_diagonal);
        CHECK((c.diagonal().cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);
    }

    std::vector<ReflectionMatrix> antipodal{ReflectionMatrix::passive(std::vector<double>{0.0, 0.0}),
                                            ReflectionMatrix::passive(std::vector<double>{pi, 1.0})};
    CHECK_THROWS_AS(combine_psi_average(antipodal, CombineMode::passive()), NumericalError);

    // active mode meets the RIS budget
    std::vector<ReflectionMatrix> two{ReflectionMatrix::passive(random_phases(rng, 6)),
                                      ReflectionMatrix::passive(random_phases(rng, 6))};
    const auto act = combine_psi_average(two, CombineMode::active_budget(3.5));
    CHECK(act.kind() == ReflectionKind::active_diagonal);
    CHECK(act.frobenius_norm2() == doctest::Approx(3.5).epsilon(1e-13));
    const CVector raw = phasor_sum(two);
    for (Eigen::Index i = 0; i < 6; ++i)
        CHECK(std::arg(act.diagonal()[i] / raw[i]) == doctest::Approx(0.0));
}

TEST_CASE("partition combining")
{
    TestRng rng(7);
    const auto a = ReflectionMatrix::passive(random_phases(rng, 4));
    const auto b = ReflectionMatrix::passive(random_phases(rng, 4));

    const auto k1 = combine_psi_partition({a}, default_partition(4, 1));
    CHECK((k1.diagonal() - a.diagonal()).norm() == 0.0);

    const auto part = default_partition(4, 2);
    CHECK(part == std::vector<int>{0, 0, 1, 1});
    const auto c = combine_psi_partition({a, b}, part);
    CHECK(c.diagonal()[0] == a.diagonal()[0]);
    CHECK(c.diagonal()[1] == a.diagonal()[1]);
    CHECK(c.diagonal()[2] == b.diagonal()[2]);
    CHECK(c.diagonal()[3] == b.diagonal()[3]);
    CHECK((c.diagonal().cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-15);

    // remainder goes to the last UE
    CHECK(default_partition(7, 3) == std::vector<int>{0, 0, 1, 1, 2, 2, 2});

    const std::vector<int> bad{0, 0, 2, 1};
    CHECK_THROWS_AS(combine_psi_partition({a, b}, bad), InvalidArgument);
    const std::vector<int> short_assignment{0, 1};
    CHECK_THROWS_AS(combine_psi_partition({a, b}, short_assignment), InvalidArgument);
}

TEST_CASE("RIS transmit power")
{
    const auto id = ReflectionMatrix::identity(3);
    CHECK(ris_transmit_power(id, CMatrix::Identity(3, 3), CMatrix::Zero(3, 1), 0.0) == 0.0);

    CMatrix f = CMatrix::Zero(3, 1);
    f(0, 0) = 1.0;
    f(1, 0) = 1.0;
    CHECK(ris_transmit_power(id, CMatrix::Identity(3, 3), f, 0.0) == doctest::Approx(2.0));

    TestRng rng(8);
    CVector d = random_cvector(rng, 5);
    const auto psi = ReflectionMatrix::active(d);
    const CMatrix h1 = random_cmatrix(rng, 5, 4);
    const CMatrix fs = random_cmatrix(rng, 4, 2);
    const double sr2 = 0.3;
    double expected = 0.0;
    for (int s = 0; s < 2; ++s)
        for (int n = 0; n < 5; ++n)
        {
            cdouble acc = 0.0;
            for (int mm = 0; mm < 4; ++mm)
                acc += h1(n, mm) * fs(mm, s);
            expected += std::norm(d[n] * acc);
        }
    for (int n = 0; n < 5; ++n)
        expected += std::norm(d[n]) * sr2;
    CHECK(ris_transmit_power(psi, h1, fs, sr2) == doctest::Approx(expected).epsilon(1e-12));
}
