// SPDX-License-Identifier: Apache-2.0
//
// rismm - link-level simulation and optimization for RIS-assisted mmWave downlinks
// ------------------------------------------------------------------------

#ifndef RISMM_CONCEPTUAL_HPP
#define RISMM_CONCEPTUAL_HPP

#include <rismm/types.hpp>

#include <array>
#include <optional>
#include <string_view>
#include <utility>

// Closed-form receive SNRs of the single-transmitter, two-reflector propagation model.
// All SNRs are linear; conversion to dB happens at presentation time.
namespace rismm::conceptual
{
    // Line-of-sight link. SNR = C0^2 / d0^2 * Pt / sigma2.
    class FreeSpaceLink
    {
    public:
        FreeSpaceLink(double d0, double c0, double pt, double sigma2);

        double distance() const { return d0_; }
        double c0() const { return c0_; }
        double pt() const { return pt_; }
        double sigma2() const { return sigma2_; }

        // LoS propagation phase 2*pi*d0/lambda
        double phase(double wavelength) const;

    private:
        double d0_, c0_, pt_, sigma2_;
    };

    // LoS plus ground reflection (reflection coefficient -1)
    class TwoRayGeometry
    {
    public:
        TwoRayGeometry(double d, double ht, double hr, double wavelength, double gt = 1.0, double gr = 1.0);

        double d() const { return d_; }
        double ht() const { return ht_; }
        double hr() const { return hr_; }
        double wavelength() const { return lambda_; }
        double gt() const { return gt_; }
        double gr() const { return gr_; }

        // Friis constant sqrt(Gt*Gr)*lambda/(4*pi)
        double c0() const;

        // Large-distance constant C0' = -sqrt(Gt*Gr)
        double c0_prime() const;

        // d >= 100*ht*hr/lambda; below this the fourth-power law is flagged as unreliable
        bool far_field() const;

    private:
        double d_, ht_, hr_, lambda_, gt_, gr_;
    };

    // One reflected path: coefficient R in (0, 1], effective distance, propagation phase.
    // Whether d_path is d_i1*d_i2 (point reflector) or d_i1+d_i2 (large reflector) is up to the caller.
    class ReflectedPath
    {
    public:
        ReflectedPath(double r, double d_path, double phi);

        double r() const { return r_; }
        double d_path() const { return d_; }
        double phi() const { return phi_; }

        // Amplitude ratio R/d
        double ratio() const { return r_ / d_; }

    private:
        double r_, d_, phi_;
    };

    struct TwoRaySnr
    {
        double snr_approx = 0.0;
        double snr_exact = 0.0;
        bool far_field_valid = true; // false: approximation flagged as unreliable
    };

    struct PathGain
    {
        double alpha = 0.0; // magnitude of the two-path sum
        double phase = 0.0; // its phase in (-pi, pi]
    };

    // Shared link constants of the reflected-path cases
    struct LinkConstants
    {
        double c0 = 1.0;
        double pt = 1.0;
        double sigma2 = 1.0;
    };

    enum class SnrCase
    {
        fading,              // receiver cannot resolve paths
        mrc_rx,              // receiver resolves and MRC-combines both paths
        tx_phase_only,       // transmitter pre-compensates phases, power split equally
        tx_full_csi,         // transmitter beamforms with gains and phases
        reflector_phase,     // reflectors cancel their own phases
        reflector_amp_phase, // reflectors set phase and amplitude under a total amplitude budget
    };

    inline constexpr std::array<SnrCase, 6> all_snr_cases = {
        SnrCase::fading, SnrCase::mrc_rx, SnrCase::tx_phase_only,
        SnrCase::tx_full_csi, SnrCase::reflector_phase, SnrCase::reflector_amp_phase};

    std::string_view to_string(SnrCase c);
    std::optional<SnrCase> snr_case_from_string(std::string_view name);

    double snr_free_space(const FreeSpaceLink &link);

    TwoRaySnr snr_two_ray(const TwoRayGeometry &geom, double pt, double sigma2);

    PathGain two_path_gain(const ReflectedPath &p1, const ReflectedPath &p2);

    // Amplitudes (a1, a2) with a1^2 + a2^2 = budget maximizing (R1 a1/d1 + R2 a2/d2)^2.
    // By Cauchy-Schwarz the maximizer is proportional to (R1/d1, R2/d2).
    std::pair<double, double> optimal_reflector_amplitudes(const ReflectedPath &p1, const ReflectedPath &p2,
                                                           double amp_budget);

    // amp_budget (a1^2 + a2^2) is mandatory for reflector_amp_phase and ignored otherwise
    double snr_case(SnrCase which, const ReflectedPath &p1, const ReflectedPath &p2, const LinkConstants &k,
                    std::optional<double> amp_budget = std::nullopt);
}

#endif
