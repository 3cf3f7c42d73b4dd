// SPDX-License-Identifier: Apache-2.0
//
// rismm - link-level simulation and optimization for RIS-assisted mmWave downlinks
// ------------------------------------------------------------------------

#include <rismm/arrays.hpp>

#include <cmath>
#include <string>

namespace rismm
{
    namespace
    {
        // [1, e^{-j2pi mu}, ..., e^{-j2pi(P-1)mu}]
        CVector axis_response(int count, double mu)
        {
            CVector a(count);
            for (int p = 0; p < count; ++p)
                a[p] = phasor(-2.0 * pi * p * mu);
            return a;
        }

        bool is_ula(const ArraySpec &s) { return std::holds_alternative<UlaSpec>(s); }
        bool is_upa(const ArraySpec &s) { return std::holds_alternative<UpaSpec>(s); }
    }

    void UlaSpec::validate() const
    {
        require(elements >= 1, "UlaSpec: element count must be >= 1");
        require(spacing_over_lambda > 0.0, "UlaSpec: spacing must be positive");
    }

    void UpaSpec::validate() const
    {
        require(nx >= 1 && ny >= 1, "UpaSpec: element counts must be >= 1");
        require(dx_over_lambda > 0.0 && dy_over_lambda > 0.0, "UpaSpec: spacing must be positive");
    }

    int element_count(const ArraySpec &spec)
    {
        return std::visit([](const auto &s)
                          {
                              if constexpr (std::is_same_v<std::decay_t<decltype(s)>, UlaSpec>)
                                  return s.elements;
                              else
                                  return s.elements(); },
                          spec);
    }

    void LinkSet::validate() const
    {
        const auto m = h1.cols();
        const auto n = h1.rows();
        const auto v = h2.rows();
        require(m > 0 && n > 0 && v > 0, "LinkSet: empty channel matrix");
        require(h2.cols() == n, "LinkSet: H2 columns must equal RIS elements (H1 rows)");
        require(h0.rows() == v && h0.cols() == m, "LinkSet: H0 must be V x M");
        require(sigma2 > 0.0, "LinkSet: sigma2 must be positive");
        require(sigma_r2 >= 0.0, "LinkSet: sigma_r2 must be non-negative");
    }

    CVector ula_steering(const UlaSpec &spec, double theta)
    {
        spec.validate();
        if (std::abs(theta) > pi / 2.0 + 1e-12)
            throw InvalidArgument("ula_steering: angle " + std::to_string(theta) + " outside [-pi/2, pi/2]");
        return axis_response(spec.elements, spec.spacing_over_lambda * std::sin(theta));
    }

    CVector upa_steering(const UpaSpec &spec, double phi, double theta)
    {
        spec.validate();
        const double mu_x = spec.dx_over_lambda * std::cos(phi) * std::sin(theta);
        const double mu_y = spec.dy_over_lambda * std::sin(phi) * std::sin(theta);
        const CVector ax = axis_response(spec.nx, mu_x);
        const CVector ay = axis_response(spec.ny, mu_y);

        // Kronecker product, element (ix*Ny + iy) = ax[ix]*ay[iy]
        CVector out(spec.elements());
        for (int ix = 0; ix < spec.nx; ++ix)
            out.segment(ix * spec.ny, spec.ny) = ax[ix] * ay;
        return out;
    }

    CVector steering(const ArraySpec &spec, const ArrayAngle &angle)
    {
        if (const auto *ula = std::get_if<UlaSpec>(&spec))
            return ula_steering(*ula, angle.theta);
        return upa_steering(std::get<UpaSpec>(spec), angle.phi, angle.theta);
    }

    CMatrix synthesize_channel(ChannelKind kind, const std::vector<PathComponent> &paths, const ArraySpec &tx_spec,
                               const ArraySpec &rx_spec)
    {
        require(!paths.empty(), "synthesize_channel: at least one path is required");
        switch (kind)
        {
        case ChannelKind::bs_ue:
            require(is_ula(tx_spec) && is_ula(rx_spec), "synthesize_channel: bs_ue expects ULA/ULA");
            break;
        case ChannelKind::bs_ris:
            require(is_ula(tx_spec) && is_upa(rx_spec), "synthesize_channel: bs_ris expects ULA/UPA");
            break;
        case ChannelKind::ris_ue:
            require(is_upa(tx_spec) && is_ula(rx_spec), "synthesize_channel: ris_ue expects UPA/ULA");
            break;
        }

        CMatrix h = CMatrix::Zero(element_count(rx_spec), element_count(tx_spec));
        for (const auto &path : paths)
            h.noalias() += path.gain * steering(rx_spec, path.aoa) * steering(tx_spec, path.aod).transpose();
        return h;
    }

    void ScenarioGeometry::validate() const
    {
        require(bs_antennas >= 1, "geometry: bs_antennas must be >= 1");
        require(!ris.empty(), "geometry: at least one RIS is required");
        for (const auto &r : ris)
            r.validate();
        require(ue_antennas >= 1, "geometry: ue_antennas must be >= 1");
        require(num_ues >= 1, "geometry: num_ues must be >= 1");
        require(direct_nlos_paths >= 0 && bs_ris_nlos_paths >= 0 && ris_ue_nlos_paths >= 0,
                "geometry: path counts must be non-negative");
        require(spacing_over_lambda > 0.0, "geometry: spacing must be positive");
        require(gain.nlos_variance >= 0.0 && gain.los_k_factor >= 0.0, "geometry: gain statistics must be non-negative");
        require(gain.direct_scale >= 0.0 && gain.bs_ris_scale >= 0.0 && gain.ris_ue_scale >= 0.0,
                "geometry: link scales must be non-negative");
        require(sigma2 > 0.0, "geometry: sigma2 must be positive");
        require(sigma_r2 >= 0.0, "geometry: sigma_r2 must be non-negative");
    }

    std::vector<LinkSet> Scenario::for_ris(int u) const
    {
        std::vector<LinkSet> out;
        out.reserve(links.size());
        for (const auto &row : links)
            out.push_back(row.at(static_cast<std::size_t>(u)));
        return out;
    }

    std::vector<PathComponent> random_paths(Rng &rng, int nlos, const GainModel &gain, double power_scale,
                                            ChannelKind kind)
    {
        std::uniform_real_distribution<double> ula_angle(-pi / 2.0, pi / 2.0);
        std::uniform_real_distribution<double> azimuth(-pi, pi);
        std::uniform_real_distribution<double> elevation(0.0, pi / 2.0);
        std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);
        std::normal_distribution<double> normal(0.0, 1.0);

        auto draw_angle = [&](bool planar)
        {
            ArrayAngle a;
            if (planar)
            {
                a.phi = azimuth(rng);
                a.theta = elevation(rng);
            }
            else
                a.theta = ula_angle(rng);
            return a;
        };
        const bool tx_planar = kind == ChannelKind::ris_ue;
        const bool rx_planar = kind == ChannelKind::bs_ris;

        std::vector<PathComponent> paths;
        paths.reserve(static_cast<std::size_t>(nlos) + 1);

        PathComponent los;
        los.is_los = true;
        los.gain = std::sqrt(gain.los_k_factor * gain.nlos_variance * power_scale) * phasor(phase(rng));
        los.aod = draw_angle(tx_planar);
        los.aoa = draw_angle(rx_planar);
        paths.push_back(los);

        const double sd = std::sqrt(gain.nlos_variance * power_scale / 2.0);
        for (int l = 0; l < nlos; ++l)
        {
            PathComponent p;
            const double re = normal(rng);
            const double im = normal(rng);
            p.gain = cdouble(sd * re, sd * im);
            p.aod = draw_angle(tx_planar);
            p.aoa = draw_angle(rx_planar);
            paths.push_back(p);
        }
        return paths;
    }

    Scenario random_scenario(std::uint64_t rng_seed, const ScenarioGeometry &geometry)
    {
        geometry.validate();
        Rng rng(rng_seed);

        const UlaSpec bs{geometry.bs_antennas, geometry.spacing_over_lambda};
        const UlaSpec ue{geometry.ue_antennas, geometry.spacing_over_lambda};
        const int k_count = geometry.num_ues;
        const int u_count = geometry.num_ris();

        // Draw order is fixed: all H1, then per UE its H0 followed by its H2 per RIS
        std::vector<CMatrix> h1(static_cast<std::size_t>(u_count));
        for (int u = 0; u < u_count; ++u)
        {
            const auto paths = random_paths(rng, geometry.bs_ris_nlos_paths, geometry.gain,
                                            geometry.gain.bs_ris_scale, ChannelKind::bs_ris);
            h1[static_cast<std::size_t>(u)] = synthesize_channel(ChannelKind::bs_ris, paths, bs,
                                                                 geometry.ris[static_cast<std::size_t>(u)]);
        }

        Scenario out;
        out.links.resize(static_cast<std::size_t>(k_count));
        for (int k = 0; k < k_count; ++k)
        {
            const auto direct = random_paths(rng, geometry.direct_nlos_paths, geometry.gain,
                                             geometry.gain.direct_scale, ChannelKind::bs_ue);
            CMatrix h0 = synthesize_channel(ChannelKind::bs_ue, direct, bs, ue);
            if (geometry.blockage)
                h0.setZero();

            auto &row = out.links[static_cast<std::size_t>(k)];
            row.reserve(static_cast<std::size_t>(u_count));
            for (int u = 0; u < u_count; ++u)
            {
                const auto paths = random_paths(rng, geometry.ris_ue_nlos_paths, geometry.gain,
                                                geometry.gain.ris_ue_scale, ChannelKind::ris_ue);
                LinkSet ls;
                ls.h0 = h0;
                ls.h1 = h1[static_cast<std::size_t>(u)];
                ls.h2 = synthesize_channel(ChannelKind::ris_ue, paths, geometry.ris[static_cast<std::size_t>(u)], ue);
                ls.sigma2 = geometry.sigma2;
                ls.sigma_r2 = geometry.sigma_r2;
                row.push_back(std::move(ls));
            }
        }
        return out;
    }
}
