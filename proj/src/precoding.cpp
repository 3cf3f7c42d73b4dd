// SPDX-License-Identifier: Apache-2.0
//
// rismm - link-level simulation and optimization for RIS-assisted mmWave downlinks
// ------------------------------------------------------------------------

#include <rismm/precoding.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace rismm
{
    CMatrix Precoder::effective() const
    {
        require(beta.size() == f.cols(), "Precoder: beta length must equal stream count");
        return f * beta.cwiseSqrt().cast<cdouble>().asDiagonal();
    }

    Precoder Precoder::from_columns(const CMatrix &f)
    {
        return Precoder{f, RVector::Ones(f.cols()), std::nullopt};
    }

    void Precoder::validate() const
    {
        require(beta.size() == f.cols(), "Precoder: beta length must equal stream count");
        require((beta.array() >= 0.0).all(), "Precoder: beta entries must be non-negative");
        if (rho)
        {
            require((rho->array() >= 0.0).all() && (rho->array() <= 1.0).all(), "Precoder: rho entries must lie in [0,1]");
            require(std::abs(rho->sum() - 1.0) < 1e-9, "Precoder: rho entries must sum to 1");
        }
    }

    void PowerBudget::validate() const
    {
        require(p_bs_max >= 0.0, "PowerBudget: BS budget must be non-negative");
        require(p_ris_max >= 0.0, "PowerBudget: RIS budget must be non-negative");
    }

    CVector mf_precoder(const CVector &h_eff)
    {
        const double n = h_eff.norm();
        require(n > 0.0, "mf_precoder: channel vector is zero");
        return h_eff.conjugate() / n;
    }

    namespace
    {
        // Inverse of the Gram matrix H H^H after a conditioning check
        CMatrix checked_gram_inverse(const CMatrix &h_eff, const char *who)
        {
            require(h_eff.rows() >= 1, std::string(who) + ": empty channel");
            require(h_eff.rows() <= h_eff.cols(),
                    std::string(who) + ": more streams than transmit antennas (K > M)");
            const CMatrix gram = h_eff * h_eff.adjoint();
            Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
            const double lo = eig.eigenvalues().minCoeff();
            const double hi = eig.eigenvalues().maxCoeff();
            if (!(lo > 0.0) || hi / lo > zf_condition_limit)
                throw NumericalError(std::string(who) + ": channel is rank deficient or ill-conditioned");
            return gram.ldlt().solve(CMatrix::Identity(gram.rows(), gram.cols()));
        }
    }

    CMatrix zf_precoder(const CMatrix &h_eff)
    {
        const CMatrix g_inv = checked_gram_inverse(h_eff, "zf_precoder");
        return h_eff.adjoint() * g_inv;
    }

    RVector zf_power_costs(const CMatrix &h_eff)
    {
        return checked_gram_inverse(h_eff, "zf_power_costs").diagonal().real();
    }

    double uniform_beta(const CMatrix &h_eff, double p_max)
    {
        require(p_max >= 0.0, "uniform_beta: power budget must be non-negative");
        return p_max / zf_power_costs(h_eff).sum();
    }

    RVector waterfill(std::span<const double> a, std::span<const double> noise, double p_max)
    {
        const std::size_t k = a.size();
        require(k >= 1, "waterfill: no channels");
        require(noise.size() == k, "waterfill: cost and noise vectors differ in length");
        require(p_max > 0.0, "waterfill: power budget must be positive");
        for (std::size_t i = 0; i < k; ++i)
        {
            require(a[i] > 0.0, "waterfill: power costs must be positive");
            require(noise[i] >= 0.0, "waterfill: noise levels must be non-negative");
        }

        // Channel i activates once the water level exceeds a_i * noise_i
        std::vector<std::size_t> order(k);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y)
                         { return a[x] * noise[x] < a[y] * noise[y]; });

        double level = 0.0;
        std::size_t active = 0;
        double floor_sum = 0.0;
        for (std::size_t m = 1; m <= k; ++m)
        {
            floor_sum += a[order[m - 1]] * noise[order[m - 1]];
            const double w = (p_max + floor_sum) / static_cast<double>(m);
            if (w > a[order[m - 1]] * noise[order[m - 1]])
            {
                level = w;
                active = m;
            }
            else
                break;
        }

        RVector beta = RVector::Zero(static_cast<Eigen::Index>(k));
        for (std::size_t m = 0; m < active; ++m)
        {
            const std::size_t i = order[m];
            beta[static_cast<Eigen::Index>(i)] = std::max(0.0, level / a[i] - noise[i]);
        }
        return beta;
    }

    RVector waterfill_beta(std::span<const double> a, double sigma2, double p_max)
    {
        require(sigma2 > 0.0, "waterfill_beta: sigma2 must be positive");
        const std::vector<double> noise(a.size(), sigma2);
        return waterfill(a, noise, p_max);
    }

    RVector maxsnr_beta(std::span<const double> a, double sigma2, double p_max)
    {
        require(!a.empty(), "maxsnr_beta: no channels");
        require(sigma2 > 0.0, "maxsnr_beta: sigma2 must be positive");
        require(p_max > 0.0, "maxsnr_beta: power budget must be positive");
        double root_sum = 0.0;
        for (double x : a)
        {
            require(x > 0.0, "maxsnr_beta: power costs must be positive");
            root_sum += std::sqrt(x);
        }
        RVector beta(static_cast<Eigen::Index>(a.size()));
        for (std::size_t i = 0; i < a.size(); ++i)
            beta[static_cast<Eigen::Index>(i)] = p_max / (std::sqrt(a[i]) * root_sum);
        return beta;
    }

    double power_split_rho(double a, double b)
    {
        require(a >= 0.0 && b >= 0.0, "power_split_rho: amplitudes must be non-negative");
        require(a + b > 0.0, "power_split_rho: both amplitudes are zero");
        return a * a / (a * a + b * b);
    }

    double split_snr(double rho, double a, double b, double m, double sigma2)
    {
        require(rho >= 0.0 && rho <= 1.0, "split_snr: rho must lie in [0,1]");
        const double amp = std::sqrt(rho) * a + std::sqrt(1.0 - rho) * b;
        return m * amp * amp / sigma2;
    }

    RplBeam best_rpl_beam(const CVector &h2_k, const CMatrix &h1)
    {
        require(h2_k.size() == h1.rows(), "best_rpl_beam: h2 length must equal RIS elements");
        require(h1.rows() >= 1, "best_rpl_beam: empty BS->RIS channel");

        RplBeam out;
        double best = -1.0;
        for (Eigen::Index i = 0; i < h1.rows(); ++i)
        {
            const double lambda = std::abs(h2_k[i]) * h1.row(i).squaredNorm();
            if (lambda > best)
            {
                best = lambda;
                out.i_opt = i;
            }
        }
        const CVector row = h1.row(out.i_opt).transpose();
        require(row.norm() > 0.0, "best_rpl_beam: selected BS->RIS row is zero");
        out.f = row.conjugate() / row.norm();
        return out;
    }

    MultiLinkAllocation multi_ris_power_alloc(std::span<const double> lambdas)
    {
        require(!lambdas.empty(), "multi_ris_power_alloc: no links");
        double total = 0.0;
        for (double l : lambdas)
        {
            require(l >= 0.0, "multi_ris_power_alloc: link amplitudes must be non-negative");
            total += l * l;
        }
        require(total > 0.0, "multi_ris_power_alloc: all link amplitudes are zero");

        MultiLinkAllocation out;
        out.rho.resize(static_cast<Eigen::Index>(lambdas.size()));
        for (std::size_t u = 0; u < lambdas.size(); ++u)
            out.rho[static_cast<Eigen::Index>(u)] = lambdas[u] * lambdas[u] / total;
        out.snr_numerator = total;
        return out;
    }

    CVector compose_split_precoder(const std::vector<CVector> &f_parts, std::span<const double> rhos)
    {
        require(!f_parts.empty(), "compose_split_precoder: no beams");
        require(f_parts.size() == rhos.size(), "compose_split_precoder: beam and split counts differ");
        const auto m = f_parts.front().size();
        double rho_sum = 0.0;
        CVector out = CVector::Zero(m);
        for (std::size_t i = 0; i < f_parts.size(); ++i)
        {
            require(f_parts[i].size() == m, "compose_split_precoder: beams differ in length");
            require(rhos[i] >= 0.0 && rhos[i] <= 1.0, "compose_split_precoder: split outside [0,1]");
            if (rhos[i] > 0.0)
                require(std::abs(f_parts[i].norm() - 1.0) < 1e-9, "compose_split_precoder: beams must have unit norm");
            rho_sum += rhos[i];
            out += std::sqrt(rhos[i]) * f_parts[i];
        }
        require(std::abs(rho_sum - 1.0) < 1e-9, "compose_split_precoder: splits must sum to 1");
        return out;
    }
}
