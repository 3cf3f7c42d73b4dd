// SPDX-License-Identifier: Apache-2.0
//
// rismm - link-level simulation and optimization for RIS-assisted mmWave downlinks
// ------------------------------------------------------------------------

#include <rismm/conceptual.hpp>

#include <cmath>

namespace rismm::conceptual
{
    FreeSpaceLink::FreeSpaceLink(double d0, double c0, double pt, double sigma2)
        : d0_(d0), c0_(c0), pt_(pt), sigma2_(sigma2)
    {
        require(d0 > 0.0, "FreeSpaceLink: d0 must be positive");
        require(c0 > 0.0, "FreeSpaceLink: C0 must be positive");
        require(pt > 0.0, "FreeSpaceLink: Pt must be positive");
        require(sigma2 > 0.0, "FreeSpaceLink: sigma2 must be positive");
    }

    double FreeSpaceLink::phase(double wavelength) const
    {
        require(wavelength > 0.0, "FreeSpaceLink::phase: wavelength must be positive");
        return 2.0 * pi * d0_ / wavelength;
    }

    TwoRayGeometry::TwoRayGeometry(double d, double ht, double hr, double wavelength, double gt, double gr)
        : d_(d), ht_(ht), hr_(hr), lambda_(wavelength), gt_(gt), gr_(gr)
    {
        require(d > 0.0, "TwoRayGeometry: d must be positive");
        require(ht > 0.0 && hr > 0.0, "TwoRayGeometry: antenna heights must be positive");
        require(wavelength > 0.0, "TwoRayGeometry: wavelength must be positive");
        require(gt > 0.0 && gr > 0.0, "TwoRayGeometry: antenna gains must be positive");
    }

    double TwoRayGeometry::c0() const { return std::sqrt(gt_ * gr_) * lambda_ / (4.0 * pi); }
    double TwoRayGeometry::c0_prime() const { return -std::sqrt(gt_ * gr_); }
    bool TwoRayGeometry::far_field() const { return d_ >= 100.0 * ht_ * hr_ / lambda_; }

    ReflectedPath::ReflectedPath(double r, double d_path, double phi)
        : r_(r), d_(d_path), phi_(phi)
    {
        require(r > 0.0 && r <= 1.0, "ReflectedPath: reflection coefficient must lie in (0, 1]");
        require(d_path > 0.0, "ReflectedPath: path distance must be positive");
    }

    std::string_view to_string(SnrCase c)
    {
        switch (c)
        {
        case SnrCase::fading:
            return "fading";
        case SnrCase::mrc_rx:
            return "mrc_rx";
        case SnrCase::tx_phase_only:
            return "tx_phase_only";
        case SnrCase::tx_full_csi:
            return "tx_full_csi";
        case SnrCase::reflector_phase:
            return "reflector_phase";
        case SnrCase::reflector_amp_phase:
            return "reflector_amp_phase";
        }
        return "unknown";
    }

    std::optional<SnrCase> snr_case_from_string(std::string_view name)
    {
        for (auto c : all_snr_cases)
            if (to_string(c) == name)
                return c;
        return std::nullopt;
    }

    double snr_free_space(const FreeSpaceLink &link)
    {
        const double c0 = link.c0();
        const double d0 = link.distance();
        return c0 * c0 / (d0 * d0) * link.pt() / link.sigma2();
    }

    TwoRaySnr snr_two_ray(const TwoRayGeometry &geom, double pt, double sigma2)
    {
        require(pt > 0.0 && sigma2 > 0.0, "snr_two_ray: Pt and sigma2 must be positive");

        TwoRaySnr out;
        const double d = geom.d();
        const double hh = geom.ht() * geom.hr();
        const double cp = geom.c0_prime();
        out.snr_approx = cp * cp * (hh * hh) / (d * d * d * d) * pt / sigma2;

        // Unapproximated LoS + ground-reflected sum with R = -1
        const double dh = geom.ht() - geom.hr();
        const double ds = geom.ht() + geom.hr();
        const double d0 = std::sqrt(d * d + dh * dh);
        const double d1 = std::sqrt(d * d + ds * ds);
        const double k = 2.0 * pi / geom.wavelength();
        const cdouble sum = phasor(k * d0) / d0 - phasor(k * d1) / d1;
        const double c0 = geom.c0();
        out.snr_exact = c0 * c0 * std::norm(sum) * pt / sigma2;

        out.far_field_valid = geom.far_field();
        return out;
    }

    PathGain two_path_gain(const ReflectedPath &p1, const ReflectedPath &p2)
    {
        const double a1 = p1.ratio();
        const double a2 = p2.ratio();
        const double re = a1 * std::cos(p1.phi()) + a2 * std::cos(p2.phi());
        const double im = a1 * std::sin(p1.phi()) + a2 * std::sin(p2.phi());

        // Closed form of the magnitude; clamp the tiny negative values rounding can produce
        const double alpha2 = a1 * a1 + a2 * a2 + 2.0 * a1 * a2 * std::cos(p1.phi() - p2.phi());
        return {std::sqrt(std::max(alpha2, 0.0)), std::atan2(im, re)};
    }

    std::pair<double, double> optimal_reflector_amplitudes(const ReflectedPath &p1, const ReflectedPath &p2,
                                                           double amp_budget)
    {
        require(amp_budget > 0.0, "optimal_reflector_amplitudes: amplitude budget must be positive");
        const double r1 = p1.ratio();
        const double r2 = p2.ratio();
        const double scale = std::sqrt(amp_budget / (r1 * r1 + r2 * r2));
        return {scale * r1, scale * r2};
    }

    double snr_case(SnrCase which, const ReflectedPath &p1, const ReflectedPath &p2, const LinkConstants &k,
                    std::optional<double> amp_budget)
    {
        require(k.c0 > 0.0 && k.pt > 0.0 && k.sigma2 > 0.0, "snr_case: C0, Pt and sigma2 must be positive");

        const double r1 = p1.ratio();
        const double r2 = p2.ratio();
        const double base = k.c0 * k.c0 * k.pt / k.sigma2;

        switch (which)
        {
        case SnrCase::fading:
        {
            const double alpha = two_path_gain(p1, p2).alpha;
            return base * alpha * alpha;
        }
        case SnrCase::mrc_rx:
        case SnrCase::tx_full_csi:
            return base * (r1 * r1 + r2 * r2);
        case SnrCase::tx_phase_only:
            return base * (r1 + r2) * (r1 + r2) / 2.0;
        case SnrCase::reflector_phase:
            return base * (r1 + r2) * (r1 + r2);
        case SnrCase::reflector_amp_phase:
        {
            if (!amp_budget)
                throw InvalidArgument("snr_case: reflector_amp_phase requires an amplitude budget");
            const auto [a1, a2] = optimal_reflector_amplitudes(p1, p2, *amp_budget);
            const double s = r1 * a1 + r2 * a2;
            return base * s * s;
        }
        }
        throw InvalidArgument("snr_case: unknown case");
    }
}
