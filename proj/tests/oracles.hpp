// SPDX-License-Identifier: Apache-2.0
//
// rismm - link-level simulation and optimization for RIS-assisted mmWave downlinks
// ------------------------------------------------------------------------

// Independent reference computations for the test suites. Nothing here calls
// into the library beyond plain data types.

#ifndef RISMM_TESTS_ORACLES_HPP
#define RISMM_TESTS_ORACLES_HPP

#include <rismm/types.hpp>

#include <cmath>
#include <random>
#include <vector>

namespace rismm::test
{
    using TestRng = std::mt19937_64;

    inline cdouble cgauss(TestRng &rng, double variance = 1.0)
    {
        std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
        const double re = n(rng);
        const double im = n(rng);
        return {re, im};
    }

    inline CMatrix random_cmatrix(TestRng &rng, Eigen::Index rows, Eigen::Index cols)
    {
        CMatrix m(rows, cols);
        for (Eigen::Index j = 0; j < cols; ++j)
            for (Eigen::Index i = 0; i < rows; ++i)
                m(i, j) = cgauss(rng);
        return m;
    }

    inline CVector random_cvector(TestRng &rng, Eigen::Index n)
    {
        return random_cmatrix(rng, n, 1).col(0);
    }

    inline CVector random_unit_vector(TestRng &rng, Eigen::Index n)
    {
        CVector v = random_cvector(rng, n);
        return v / v.norm();
    }

    inline double uniform(TestRng &rng, double lo, double hi)
    {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    }

    inline std::vector<double> random_phases(TestRng &rng, Eigen::Index n)
    {
        std::vector<double> p(static_cast<std::size_t>(n));
        for (auto &x : p)
            x = uniform(rng, 0.0, 2.0 * pi);
        return p;
    }

    // Uniform point on the probability simplex (normalized exponentials)
    inline std::vector<double> simplex_sample(TestRng &rng, std::size_t k)
    {
        std::exponential_distribution<double> e(1.0);
        std::vector<double> w(k);
        double s = 0.0;
        for (auto &x : w)
        {
            x = e(rng);
            s += x;
        }
        for (auto &x : w)
            x /= s;
        return w;
    }

    inline std::vector<double> linspace(double lo, double hi, std::size_t n)
    {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i)
            v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        return v;
    }

    // Triple loop product, no Eigen expression templates
    inline CMatrix naive_product(const CMatrix &a, const CMatrix &b)
    {
        CMatrix c = CMatrix::Zero(a.rows(), b.cols());
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            for (Eigen::Index j = 0; j < b.cols(); ++j)
            {
                cdouble s = 0.0;
                for (Eigen::Index l = 0; l < a.cols(); ++l)
                    s += a(i, l) * b(l, j);
                c(i, j) = s;
            }
        return c;
    }

    inline CMatrix naive_diag_product(const CMatrix &h2, const CVector &psi, const CMatrix &h1)
    {
        CMatrix scaled = h2;
        for (Eigen::Index j = 0; j < h2.cols(); ++j)
            for (Eigen::Index i = 0; i < h2.rows(); ++i)
                scaled(i, j) *= psi[j];
        return naive_product(scaled, h1);
    }

    inline double max_abs(const CMatrix &m)
    {
        double out = 0.0;
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            for (Eigen::Index i = 0; i < m.rows(); ++i)
                out = std::max(out, std::abs(m(i, j)));
        return out;
    }

    inline double rel_diff(double a, double b)
    {
        const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
        return std::abs(a - b) / scale;
    }

    // Split SNR of a unit-norm split beam, evaluated from its pieces
    inline double split_snr_oracle(double rho, double a, double b, double m, double sigma2)
    {
        const double amp = std::sqrt(rho) * a + std::sqrt(1.0 - rho) * b;
        return m * amp * amp / sigma2;
    }

    // Sum rate of ZF streams with per-stream gains beta and costs a
    inline double zf_rate_oracle(const std::vector<double> &beta, double sigma2)
    {
        double r = 0.0;
        for (double b : beta)
            r += std::log2(1.0 + b / sigma2);
        return r;
    }

    // Least-squares slope of y against x
    inline double ls_slope(const std::vector<double> &x, const std::vector<double> &y)
    {
        const double n = static_cast<double>(x.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            sx += x[i];
            sy += y[i];
            sxx += x[i] * x[i];
            sxy += x[i] * y[i];
        }
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
}

#endif
