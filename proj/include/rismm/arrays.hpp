// SPDX-License-Identifier: Apache-2.0
//
// rismm - link-level simulation and optimization for RIS-assisted mmWave downlinks
// ------------------------------------------------------------------------

#ifndef RISMM_ARRAYS_HPP
#define RISMM_ARRAYS_HPP

#include <rismm/types.hpp>

#include <cstdint>
#include <random>
#include <variant>
#include <vector>

namespace rismm
{
    using Rng = std::mt19937_64;

    // Uniform linear array with P elements (BS and UE side)
    struct UlaSpec
    {
        int elements = 1;
        double spacing_over_lambda = 0.5;

        void validate() const;
    };

    // Uniform planar array with Nx*Ny elements (RIS side)
    struct UpaSpec
    {
        int nx = 1;
        int ny = 1;
        double dx_over_lambda = 0.5;
        double dy_over_lambda = 0.5;

        int elements() const { return nx * ny; }
        void validate() const;
    };

    using ArraySpec = std::variant<UlaSpec, UpaSpec>;

    int element_count(const ArraySpec &spec);

    // Direction seen by one array. ULA uses theta only (physical angle in [-pi/2, pi/2]);
    // UPA uses phi as azimuth and theta as elevation.
    struct ArrayAngle
    {
        double theta = 0.0;
        double phi = 0.0;
    };

    // One ray of the Saleh-Valenzuela sum
    struct PathComponent
    {
        cdouble gain{1.0, 0.0};
        ArrayAngle aod; // departure side (transmit array)
        ArrayAngle aoa; // arrival side (receive array)
        bool is_los = false;
    };

    // Channel triple of one (UE, RIS) pair plus noise levels
    struct LinkSet
    {
        CMatrix h0;            // V x M, BS -> UE (all-zero when the direct link is blocked)
        CMatrix h1;            // N x M, BS -> RIS
        CMatrix h2;            // V x N, RIS -> UE (reflection loss folded in)
        double sigma2 = 1.0;   // receiver noise variance
        double sigma_r2 = 0.0; // RIS noise variance, zero for a passive RIS

        Eigen::Index bs_antennas() const { return h1.cols(); }
        Eigen::Index ris_elements() const { return h1.rows(); }
        Eigen::Index ue_antennas() const { return h2.rows(); }

        void validate() const;
    };

    // entry p = exp(-j*2*pi*p*(d/lambda)*sin(theta)), p = 0..P-1
    CVector ula_steering(const UlaSpec &spec, double theta);

    // a(Nx; mu_x) kron a(Ny; mu_y), mu_x = dx/lambda*cos(phi)sin(theta), mu_y = dy/lambda*sin(phi)sin(theta)
    CVector upa_steering(const UpaSpec &spec, double phi, double theta);

    CVector steering(const ArraySpec &spec, const ArrayAngle &angle);

    enum class ChannelKind
    {
        bs_ue,  // ULA -> ULA
        bs_ris, // ULA -> UPA
        ris_ue, // UPA -> ULA
    };

    // sum_l gain_l * a_rx(aoa_l) * a_tx(aod_l)^T, a (rx elements) x (tx elements) matrix
    CMatrix synthesize_channel(ChannelKind kind, const std::vector<PathComponent> &paths, const ArraySpec &tx_spec,
                               const ArraySpec &rx_spec);

    // Path gain statistics: NLoS gains are CN(0, nlos_variance); the LoS gain has
    // magnitude sqrt(los_k_factor * nlos_variance) and a uniform random phase.
    struct GainModel
    {
        double nlos_variance = 1.0;
        double los_k_factor = 10.0;
        // Power multipliers per link, for setting DPL/RPL balance
        double direct_scale = 1.0;
        double bs_ris_scale = 1.0;
        double ris_ue_scale = 1.0;
    };

    struct ScenarioGeometry
    {
        int bs_antennas = 8;          // M
        std::vector<UpaSpec> ris{{}}; // one entry per RIS (U = ris.size())
        int ue_antennas = 1;          // V
        int num_ues = 1;              // K
        int direct_nlos_paths = 2;    // L0
        int bs_ris_nlos_paths = 2;    // L1
        int ris_ue_nlos_paths = 2;    // L2
        bool blockage = false;        // zero H0
        double spacing_over_lambda = 0.5;
        GainModel gain;
        double sigma2 = 1.0;
        double sigma_r2 = 0.0;

        int num_ris() const { return static_cast<int>(ris.size()); }
        void validate() const;
    };

    // links[k][u]: UE k through RIS u. H0 of a UE and H1 of a RIS are shared across the grid.
    struct Scenario
    {
        std::vector<std::vector<LinkSet>> links;

        int num_ues() const { return static_cast<int>(links.size()); }
        int num_ris() const { return links.empty() ? 0 : static_cast<int>(links.front().size()); }

        // Single-RIS view: per-UE link sets of RIS u
        std::vector<LinkSet> for_ris(int u) const;
    };

    // Draws one path list: 1 LoS ray + nlos NLoS rays with random angles
    std::vector<PathComponent> random_paths(Rng &rng, int nlos, const GainModel &gain, double power_scale,
                                            ChannelKind kind);

    // Deterministic for a fixed seed
    Scenario random_scenario(std::uint64_t rng_seed, const ScenarioGeometry &geometry);
}

#endif
