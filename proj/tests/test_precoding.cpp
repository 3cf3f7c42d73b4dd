// SPDX-License-Identifier: Apache-2.0
//
// rismm - link-level simulation and optimization for RIS-assisted mmWave downlinks
// ------------------------------------------------------------------------

#include "oracles.hpp"

#include <rismm/precoding.hpp>

#include <doctest.h>

using namespace rismm;
using namespace rismm::test;

namespace
{
    double rate(const RVector &beta, double sigma2)
    {
        double r = 0.0;
        for (Eigen::Index i = 0; i < beta.size(); ++i)
            r += std::log2(1.0 + beta[i] / sigma2);
        return r;
    }
}

TEST_CASE("matched filter")
{
    CVector h(2);
    h << 1.0, 0.0;
    const CVector f = mf_precoder(h);
    CHECK(std::abs(f[0] - cdouble(1.0)) < 1e-15);
    CHECK(std::abs(f[1]) < 1e-15);
    CHECK_THROWS_AS(mf_precoder(CVector::Zero(3)), InvalidArgument);

    TestRng rng(1);
    const CVector g = random_cvector(rng, 6);
    const CVector fg = mf_precoder(g);
    CHECK(fg.norm() == doctest::Approx(1.0).epsilon(1e-14));
    const double best = std::abs(g.dot(fg.conjugate()));
    CHECK(best == doctest::Approx(g.norm()).epsilon(1e-13));
    for (int i = 0; i < 1000; ++i)
        CHECK(std::abs(g.dot(random_unit_vector(rng, 6).conjugate())) <= best + 1e-12);
}

TEST_CASE("zero forcing")
{
    TestRng rng(2);
    const CMatrix h = random_cmatrix(rng, 1, 5);
    const CMatrix f = zf_precoder(h);
    CHECK((f - h.adjoint() / h.squaredNorm()).norm() < 1e-14);
    CHECK(std::abs((h * f)(0, 0) - cdouble(1.0)) < 1e-14);

    CHECK((zf_precoder(CMatrix::Identity(3, 3)) - CMatrix::Identity(3, 3)).norm() < 1e-15);

    const CMatrix h2 = random_cmatrix(rng, 2, 8);
    CHECK(max_abs(naive_product(h2, zf_precoder(h2)) - CMatrix::Identity(2, 2)) < 1e-10);

    CHECK_THROWS_AS(zf_precoder(random_cmatrix(rng, 4, 3)), InvalidArgument);
    CMatrix rank1(2, 4);
    rank1.row(0) = random_cmatrix(rng, 1, 4);
    rank1.row(1) = 2.0 * rank1.row(0);
    CHECK_THROWS_AS(zf_precoder(rank1), NumericalError);
}

TEST_CASE("uniform beta")
{
    CHECK(uniform_beta(CMatrix::Identity(3, 3), 6.0) == doctest::Approx(2.0));

    TestRng rng(3);
    const CMatrix h = random_cmatrix(rng, 3, 7);
    const double b = uniform_beta(h, 2.0);
    CHECK(uniform_beta(2.5 * h, 2.0) == doctest::Approx(6.25 * b).epsilon(1e-12));

    const CMatrix gram_inv = (h * h.adjoint()).inverse();
    CHECK(rel_diff(b * gram_inv.trace().real(), 2.0) < 1e-10);
    // columns of the ZF precoder carry exactly that power
    const CMatrix f = zf_precoder(h);
    CHECK(rel_diff(b * f.squaredNorm(), 2.0) < 1e-10);
    CHECK((zf_power_costs(h) - f.colwise().squaredNorm().transpose()).norm() < 1e-12);
}

TEST_CASE("water-filling")
{
    const std::vector<double> sym{1.0, 1.0};
    const RVector b1 = waterfill_beta(sym, 1.0, 2.0);
    CHECK(b1[0] == doctest::Approx(1.0));
    CHECK(b1[1] == doctest::Approx(1.0));
    CHECK(rate(b1, 1.0) == doctest::Approx(2.0));

    const std::vector<double> a{1.0, 4.0};
    const RVector b2 = waterfill_beta(a, 1.0, 5.0);
    CHECK(std::abs(b2[0] - 4.0) < 1e-12);
    CHECK(std::abs(b2[1] - 0.25) < 1e-12);
    CHECK(rate(b2, 1.0) == doctest::Approx(std::log2(5.0) + std::log2(1.25)).epsilon(1e-13));
    CHECK(rate(b2, 1.0) == doctest::Approx(2.644).epsilon(1e-3));

    // fine grid over the constraint line a0 b0 + a1 b1 = 5
    double grid_best = 0.0;
    for (double x : linspace(0.0, 5.0, 200001))
        grid_best = std::max(grid_best, std::log2(1.0 + x) + std::log2(1.0 + (5.0 - x) / 4.0));
    CHECK(rate(b2, 1.0) >= grid_best - 1e-12);

    // tiny budget: only the cheapest channel
    const std::vector<double> three{3.0, 1.0, 2.0};
    const RVector tiny = waterfill_beta(three, 1.0, 1e-6);
    CHECK(tiny[1] > 0.0);
    CHECK(tiny[0] == 0.0);
    CHECK(tiny[2] == 0.0);

    CHECK_THROWS_AS(waterfill_beta(std::vector<double>{1.0, 0.0}, 1.0, 1.0), InvalidArgument);
}

TEST_CASE("water-filling KKT and dominance over uniform")
{
    TestRng rng(4);
    for (int trial = 0; trial < 500; ++trial)
    {
        const int k = 1 + trial % 6;
        std::vector<double> a(static_cast<std::size_t>(k));
        for (auto &x : a)
            x = std::exp(uniform(rng, -3.0, 3.0));
        const double sigma2 = uniform(rng, 0.1, 2.0);
        const double p = std::exp(uniform(rng, -2.0, 3.0));
        const RVector beta = waterfill_beta(a, sigma2, p);

        double used = 0.0;
        double level = -1.0;
        for (int i = 0; i < k; ++i)
        {
            CHECK(beta[i] >= 0.0);
            used += a[static_cast<std::size_t>(i)] * beta[i];
            if (beta[i] > 0.0)
            {
                const double li = a[static_cast<std::size_t>(i)] * (beta[i] + sigma2);
                if (level < 0.0)
                    level = li;
                CHECK(rel_diff(li, level) < 1e-8);
            }
        }
        CHECK(rel_diff(used, p) < 1e-10);
        for (int i = 0; i < k; ++i)
            if (beta[i] == 0.0)
                CHECK(a[static_cast<std::size_t>(i)] * sigma2 >= level * (1.0 - 1e-12));

        double asum = 0.0;
        for (double x : a)
            asum += x;
        const RVector uni = RVector::Constant(k, p / asum);
        CHECK(rate(beta, sigma2) >= rate(uni, sigma2) - 1e-12);
    }
}

TEST_CASE("water-filling with per-channel noise")
{
    const std::vector<double> a{1.0, 1.0};
    const std::vector<double> noise{0.5, 2.0};
    const RVector b = waterfill(a, noise, 3.0);
    // level: (3 + 2.5) / 2 = 2.75
    CHECK(b[0] == doctest::Approx(2.25));
    CHECK(b[1] == doctest::Approx(0.75));
}

TEST_CASE("max-SNR allocation")
{
    const std::vector<double> sym{1.0, 1.0};
    const RVector b1 = maxsnr_beta(sym, 1.0, 2.0);
    CHECK(b1[0] == doctest::Approx(1.0));
    CHECK(b1[1] == doctest::Approx(1.0));

    const std::vector<double> a{1.0, 4.0};
    const RVector b2 = maxsnr_beta(a, 1.0, 5.0);
    CHECK(std::abs(b2[0] - 5.0 / 3.0) < 1e-12);
    CHECK(std::abs(b2[1] - 5.0 / 6.0) < 1e-12);
    CHECK(1.0 / b2[0] + 1.0 / b2[1] == doctest::Approx(1.8));
    CHECK(a[0] * b2[0] + a[1] * b2[1] == doctest::Approx(5.0).epsilon(1e-12));

    double grid_best = 1e300;
    for (double x : linspace(1e-3, 5.0 - 1e-3, 100001))
        grid_best = std::min(grid_best, 1.0 / x + 4.0 / (5.0 - x));
    CHECK(1.0 / b2[0] + 1.0 / b2[1] <= grid_best + 1e-12);
}

TEST_CASE("power split between direct and reflected links")
{
    CHECK(power_split_rho(2.0, 2.0) == doctest::Approx(0.5));
    CHECK(power_split_rho(0.0, 3.0) == 0.0);
    CHECK(power_split_rho(3.0, 4.0) == doctest::Approx(0.36).epsilon(1e-15));
    CHECK_THROWS_AS(power_split_rho(0.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(power_split_rho(-1.0, 1.0), InvalidArgument);

    const auto grid = linspace(0.0, 1.0, 100001);
    double best = -1.0, arg = 0.0;
    for (double r : grid)
    {
        const double s = split_snr_oracle(r, 3.0, 4.0, 1.0, 1.0);
        if (s > best)
        {
            best = s;
            arg = r;
        }
    }
    CHECK(std::abs(arg - 0.36) <= 1e-5);
    CHECK(split_snr(0.36, 3.0, 4.0, 1.0, 1.0) == doctest::Approx(25.0).epsilon(1e-14));

    TestRng rng(5);
    for (int i = 0; i < 200; ++i)
    {
        const double a = uniform(rng, 0.01, 5.0), b = uniform(rng, 0.01, 5.0);
        const double m = 1.0 + i % 8, s2 = uniform(rng, 0.1, 2.0);
        const double rho = power_split_rho(a, b);
        const double top = split_snr(rho, a, b, m, s2);
        CHECK(rel_diff(top, m * (a * a + b * b) / s2) < 1e-12);
        CHECK(rel_diff(top, split_snr_oracle(rho, a, b, m, s2)) < 1e-14);
        if (rho > 1e-4 && rho < 1.0 - 1e-4)
        {
            CHECK(split_snr(rho - 1e-4, a, b, m, s2) < top);
            CHECK(split_snr(rho + 1e-4, a, b, m, s2) < top);
        }
    }
}

TEST_CASE("best RPL beam")
{
    CMatrix h1(2, 3);
    h1 << 1.0, 0.0, 0.0, cdouble(0.0, 1.0), 1.0, 1.0;
    CVector h2(2);
    h2 << 1.0, 1.0;
    const auto r = best_rpl_beam(h2, h1);
    CHECK(r.i_opt == 1);
    CHECK(r.f.norm() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK((r.f - CVector(h1.row(1).adjoint() / std::sqrt(3.0))).norm() < 1e-15);

    const CMatrix same = CMatrix::Ones(4, 3);
    CHECK(best_rpl_beam(CVector::Ones(4), same).i_opt == 0);

    TestRng rng(6);
    const CMatrix g1 = random_cmatrix(rng, 8, 64);
    const CVector g2 = random_cvector(rng, 8);
    const auto beam = best_rpl_beam(g2, g1);
    CHECK(beam.f.norm() == doctest::Approx(1.0).epsilon(1e-14));
    std::vector<double> lambda(8);
    for (int i = 0; i < 8; ++i)
        lambda[static_cast<std::size_t>(i)] = std::abs(g2[i]) * g1.row(i).squaredNorm();
    const double j_opt = lambda[static_cast<std::size_t>(beam.i_opt)];
    for (int s = 0; s < 10000; ++s)
    {
        const auto w = simplex_sample(rng, 8);
        double j = 0.0;
        for (int i = 0; i < 8; ++i)
            j += w[static_cast<std::size_t>(i)] * lambda[static_cast<std::size_t>(i)];
        CHECK(j <= j_opt + 1e-12);
    }
}

TEST_CASE("multi-link power allocation")
{
    const std::vector<double> l{3.0, 4.0};
    const auto a = multi_ris_power_alloc(l);
    CHECK(a.rho[0] == doctest::Approx(0.36));
    CHECK(a.rho[1] == doctest::Approx(0.64));
    CHECK(a.snr_numerator == doctest::Approx(25.0));
    CHECK(multi_ris_power_alloc(std::vector<double>{2.0}).rho[0] == 1.0);
    CHECK_THROWS_AS(multi_ris_power_alloc(std::vector<double>{0.0, 0.0}), InvalidArgument);

    TestRng rng(7);
    for (int t = 0; t < 20; ++t)
    {
        const std::size_t n = 2 + static_cast<std::size_t>(t % 4);
        std::vector<double> lam(n);
        for (auto &x : lam)
            x = uniform(rng, 0.0, 3.0);
        const auto alloc = multi_ris_power_alloc(lam);
        double amp = 0.0, total = 0.0, eq = 0.0;
        for (std::size_t u = 0; u < n; ++u)
        {
            amp += std::sqrt(alloc.rho[static_cast<Eigen::Index>(u)]) * lam[u];
            total += lam[u] * lam[u];
            eq += std::sqrt(1.0 / static_cast<double>(n)) * lam[u];
        }
        CHECK(rel_diff(amp * amp, total) < 1e-12);
        CHECK(alloc.rho.sum() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(amp * amp >= eq * eq - 1e-12);
        for (int s = 0; s < 1000; ++s)
        {
            const auto w = simplex_sample(rng, n);
            double x = 0.0;
            for (std::size_t u = 0; u < n; ++u)
                x += std::sqrt(w[u]) * lam[u];
            CHECK(x * x <= total * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("split precoder composition")
{
    TestRng rng(8);
    const CVector f = random_unit_vector(rng, 4);
    const std::vector<double> one{1.0};
    CHECK((compose_split_precoder({f}, one) - f).norm() < 1e-15);

    CVector e0 = CVector::Unit(3, 0), e1 = CVector::Unit(3, 1);
    const std::vector<double> half{0.5, 0.5};
    CHECK(compose_split_precoder({e0, e1}, half).norm() == doctest::Approx(1.0).epsilon(1e-15));

    for (int t = 0; t < 50; ++t)
    {
        const CMatrix q = random_cmatrix(rng, 6, 3).householderQr().householderQ() * CMatrix::Identity(6, 3);
        const auto w = simplex_sample(rng, 3);
        const CVector out = compose_split_precoder({q.col(0), q.col(1), q.col(2)}, w);
        CHECK(std::abs(out.norm() - 1.0) < 1e-12);
    }

    CHECK_THROWS_AS(compose_split_precoder({e0, e1}, one), InvalidArgument);
    const std::vector<double> unnormalized{0.5, 0.4};
    CHECK_THROWS_AS(compose_split_precoder({e0, e1}, unnormalized), InvalidArgument);
}

TEST_CASE("precoder validation and effective matrix")
{
    TestRng rng(9);
    Precoder p{random_cmatrix(rng, 4, 2), RVector::Constant(2, 4.0), std::nullopt};
    CHECK((p.effective() - 2.0 * p.f).norm() < 1e-14);
    p.beta[0] = -1.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p.beta[0] = 1.0;
    p.rho = RVector::Constant(2, 0.3);
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
}
