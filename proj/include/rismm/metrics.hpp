// SPDX-License-Identifier: Apache-2.0
//
// rismm - link-level simulation and optimization for RIS-assisted mmWave downlinks
// ------------------------------------------------------------------------

#ifndef RISMM_METRICS_HPP
#define RISMM_METRICS_HPP

#include <rismm/arrays.hpp>
#include <rismm/precoding.hpp>
#include <rismm/ris.hpp>

#include <optional>
#include <span>
#include <vector>

namespace rismm
{
    // Full downlink configuration: channels, surfaces, precoder and combiners.
    //
    // Streams are grouped by UE: UE k owns combiners[k].cols() consecutive precoder columns.
    // kappa(u, k) = 1 routes UE k's reception through RIS u; RIS on-off switching is a
    // row of all zeros.
    struct SystemState
    {
        std::vector<std::vector<LinkSet>> links; // links[k][u]
        std::vector<ReflectionMatrix> psi;       // one per RIS
        Precoder precoder;
        std::vector<CMatrix> combiners; // W_k, V x S_k
        Eigen::MatrixXi kappa;          // U x K, entries in {0,1}
        double bandwidth_hz = 0.0;      // 0: rates in bits/s/Hz
        std::vector<double> weights;    // per-UE rate weights, empty means all 1

        int num_ues() const { return static_cast<int>(links.size()); }
        int num_ris() const { return static_cast<int>(psi.size()); }
        Eigen::Index stream_offset(int k) const;
        Eigen::Index streams_of(int k) const { return combiners.at(static_cast<std::size_t>(k)).cols(); }

        // H_k = H_{k,0} + sum_u kappa(u,k) H_{uk,2} Psi_u H_{u1}
        CMatrix composite(int k) const;

        // Whether RIS u serves anybody (kappa_u of the on-off model)
        bool ris_on(int u) const;

        void validate() const;

        // Single-RIS state with every UE associated, single-antenna combiners [1] when V = 1
        static SystemState single_ris(std::vector<LinkSet> per_ue, ReflectionMatrix psi, Precoder precoder,
                                      std::vector<CMatrix> combiners = {});
    };

    struct PowerModelParams
    {
        double eta = 1.0;                  // amplifier efficiency in (0, 1]
        double p_bs_circuit = 0.0;         // W
        double p_ris_element = 0.0;        // W per active RIS element
        std::vector<double> p_ue_circuit;  // W per UE; a single entry applies to every UE

        void validate() const;
        double ue_circuit(int k) const;
    };

    // Per-stream SINR of UE k: desired power over ISI + MUI + forwarded RIS noise + receiver noise.
    // Receiver noise is sigma2 * ||w||^2 so unit-norm combiners reproduce the plain sigma2 term.
    // RIS noise is only forwarded by active or general surfaces.
    RVector sinr_streams(const SystemState &state, int k);

    // SINRs of every UE
    std::vector<RVector> all_sinrs(const SystemState &state);

    // log2(1 + x) without cancellation for tiny x
    double log2_1p(double x);

    // sum_k w_k sum_s log2(1 + gamma_{k,s}), times the bandwidth when given
    double sum_rate(const std::vector<RVector> &sinrs, std::span<const double> weights = {},
                    std::optional<double> bandwidth_hz = std::nullopt);

    // Sum rate of a state with its own weights and bandwidth
    double state_sum_rate(const SystemState &state);

    // log2 det(I + H Q H^H / sigma2) with Q from the SVD eigenbeams and water-filling under Tr(Q) <= p_max
    double capacity_fixed_psi(const CMatrix &h, double p_max, double sigma2);

    // Sum of squared column norms of the beta-scaled precoder
    double bs_transmit_power(const Precoder &precoder);

    // RIS transmit power summed over the surfaces that are on
    double ris_power(const SystemState &state);

    // sum ||f_k||^2 / eta + P_Bc + sum_u kappa_u N_u P_Re + sum_k P_kc
    double total_power(const SystemState &state, const PowerModelParams &params);

    // Sum rate over total power
    double energy_efficiency(const SystemState &state, const PowerModelParams &params);

    // Standard metric set of one state
    struct StateMetrics
    {
        double sum_rate = 0.0;
        std::vector<double> sinr_db; // per UE; multi-stream UEs report 2^{R_k} - 1
        double p_bs = 0.0;
        double p_ris = 0.0;
        double p_total = 0.0;
        double ee = 0.0;
    };

    StateMetrics evaluate_metrics(const SystemState &state, const PowerModelParams &params);
}

#endif
