// SPDX-License-Identifier: Apache-2.0
//
// rismm - link-level simulation and optimization for RIS-assisted mmWave downlinks
// ------------------------------------------------------------------------

#ifndef RISMM_PRECODING_HPP
#define RISMM_PRECODING_HPP

#include <rismm/types.hpp>

#include <optional>
#include <span>
#include <vector>

namespace rismm
{
    // BS precoder. Stream s is transmitted with f_s = F(:, s) * sqrt(beta_s).
    struct Precoder
    {
        CMatrix f;                 // M x S directions
        RVector beta;              // length S power scalings, >= 0
        std::optional<RVector> rho; // DPL/RPL (or per-link) power split, entries in [0,1] summing to 1

        // Columns already scaled by sqrt(beta)
        CMatrix effective() const;
        Eigen::Index streams() const { return f.cols(); }

        static Precoder from_columns(const CMatrix &f);
        void validate() const;
    };

    struct PowerBudget
    {
        double p_bs_max = 1.0;
        double p_ris_max = 1.0;

        void validate() const;
    };

    // Condition-number limit for the Gram matrix H H^H of a ZF design
    inline constexpr double zf_condition_limit = 1e10;

    // conj(h)/||h||
    CVector mf_precoder(const CVector &h_eff);

    // H^H (H H^H)^{-1}; H_eff is K x M with K <= M, result is M x K
    CMatrix zf_precoder(const CMatrix &h_eff);

    // a_k = [(H H^H)^{-1}]_{kk}, the power cost of unit gain on stream k under ZF
    RVector zf_power_costs(const CMatrix &h_eff);

    // Equal gain beta = p_max / Tr((H H^H)^{-1})
    double uniform_beta(const CMatrix &h_eff, double p_max);

    // beta_k = max(0, w/a_k - noise_k) with water level w set so that sum a_k beta_k = p_max.
    // Exact sorted-channel solution.
    RVector waterfill(std::span<const double> a, std::span<const double> noise, double p_max);

    // Water-filling for a common noise variance
    RVector waterfill_beta(std::span<const double> a, double sigma2, double p_max);

    // Minimizer of sigma2 * sum 1/beta_k subject to sum a_k beta_k <= p_max
    RVector maxsnr_beta(std::span<const double> a, double sigma2, double p_max);

    // rho = a^2/(a^2+b^2), the DPL share maximizing M(sqrt(rho) a + sqrt(1-rho) b)^2 / sigma2
    double power_split_rho(double a, double b);

    // M(sqrt(rho) a + sqrt(1-rho) b)^2 / sigma2
    double split_snr(double rho, double a, double b, double m, double sigma2);

    struct RplBeam
    {
        CVector f;
        Eigen::Index i_opt = 0;
    };

    // Picks the BS->RIS row maximizing |h2_i| ||h1_i||^2 (lowest index on ties) and returns
    // its normalized conjugate as the RPL beam
    RplBeam best_rpl_beam(const CVector &h2_k, const CMatrix &h1);

    struct MultiLinkAllocation
    {
        RVector rho;
        double snr_numerator = 0.0; // sum lambda_u^2, the SNR times sigma2
    };

    // rho_u = lambda_u^2 / sum lambda_l^2
    MultiLinkAllocation multi_ris_power_alloc(std::span<const double> lambdas);

    // sum_u sqrt(rho_u) f_u
    CVector compose_split_precoder(const std::vector<CVector> &f_parts, std::span<const double> rhos);
}

#endif
