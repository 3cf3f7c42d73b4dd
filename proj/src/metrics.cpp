// SPDX-License-Identifier: Apache-2.0
//
// rismm - link-level simulation and optimization for RIS-assisted mmWave downlinks
// ------------------------------------------------------------------------

#include <rismm/metrics.hpp>

#include <cmath>
#include <numbers>
#include <string>

namespace rismm
{
    Eigen::Index SystemState::stream_offset(int k) const
    {
        Eigen::Index offset = 0;
        for (int l = 0; l < k; ++l)
            offset += streams_of(l);
        return offset;
    }

    CMatrix SystemState::composite(int k) const
    {
        const auto &row = links.at(static_cast<std::size_t>(k));
        CMatrix h = row.front().h0;
        for (int u = 0; u < num_ris(); ++u)
            if (kappa(u, k) != 0)
            {
                const auto &ls = row[static_cast<std::size_t>(u)];
                h += psi[static_cast<std::size_t>(u)].apply_right(ls.h2) * ls.h1;
            }
        return h;
    }

    bool SystemState::ris_on(int u) const
    {
        return (kappa.row(u).array() != 0).any();
    }

    void SystemState::validate() const
    {
        const int k_count = num_ues();
        const int u_count = num_ris();
        require(k_count >= 1, "SystemState: no UEs");
        require(u_count >= 1, "SystemState: no RIS");
        require(static_cast<int>(combiners.size()) == k_count, "SystemState: one combiner per UE is required");
        require(kappa.rows() == u_count && kappa.cols() == k_count, "SystemState: kappa must be U x K");
        require(((kappa.array() == 0) || (kappa.array() == 1)).all(), "SystemState: kappa must be binary");
        if (!weights.empty())
            require(static_cast<int>(weights.size()) == k_count, "SystemState: one weight per UE is required");
        require(bandwidth_hz >= 0.0, "SystemState: bandwidth must be non-negative");

        const auto m = links.front().front().bs_antennas();
        Eigen::Index total_streams = 0;
        for (int k = 0; k < k_count; ++k)
        {
            const auto &row = links[static_cast<std::size_t>(k)];
            require(static_cast<int>(row.size()) == u_count, "SystemState: every UE needs one link set per RIS");
            for (int u = 0; u < u_count; ++u)
            {
                const auto &ls = row[static_cast<std::size_t>(u)];
                ls.validate();
                require(ls.bs_antennas() == m, "SystemState: BS antenna count differs between link sets");
                require(ls.ris_elements() == psi[static_cast<std::size_t>(u)].size(),
                        "SystemState: reflection matrix size differs from RIS " + std::to_string(u));
                require(ls.ue_antennas() == row.front().ue_antennas(), "SystemState: UE antenna count differs between RIS");
            }
            const auto &w = combiners[static_cast<std::size_t>(k)];
            require(w.rows() == row.front().ue_antennas(), "SystemState: combiner rows must equal UE antennas");
            total_streams += w.cols();
        }
        require(precoder.f.rows() == m, "SystemState: precoder rows must equal BS antennas");
        require(precoder.f.cols() == total_streams, "SystemState: precoder columns must equal total streams");
        precoder.validate();
    }

    SystemState SystemState::single_ris(std::vector<LinkSet> per_ue, ReflectionMatrix psi, Precoder precoder,
                                        std::vector<CMatrix> combiners)
    {
        SystemState s;
        const int k_count = static_cast<int>(per_ue.size());
        require(k_count >= 1, "SystemState::single_ris: no UEs");
        if (combiners.empty())
            for (const auto &ls : per_ue)
            {
                require(ls.ue_antennas() == 1, "SystemState::single_ris: multi-antenna UEs need explicit combiners");
                combiners.push_back(CMatrix::Ones(1, 1));
            }
        for (auto &ls : per_ue)
            s.links.push_back({std::move(ls)});
        s.psi.push_back(std::move(psi));
        s.precoder = std::move(precoder);
        s.combiners = std::move(combiners);
        s.kappa = Eigen::MatrixXi::Ones(1, k_count);
        return s;
    }

    void PowerModelParams::validate() const
    {
        require(eta > 0.0 && eta <= 1.0, "PowerModelParams: eta must lie in (0, 1]");
        require(p_bs_circuit >= 0.0 && p_ris_element >= 0.0, "PowerModelParams: circuit powers must be non-negative");
        for (double p : p_ue_circuit)
            require(p >= 0.0, "PowerModelParams: UE circuit powers must be non-negative");
    }

    double PowerModelParams::ue_circuit(int k) const
    {
        if (p_ue_circuit.empty())
            return 0.0;
        if (p_ue_circuit.size() == 1)
            return p_ue_circuit.front();
        return p_ue_circuit.at(static_cast<std::size_t>(k));
    }

    RVector sinr_streams(const SystemState &state, int k)
    {
        require(k >= 0 && k < state.num_ues(), "sinr_streams: UE index out of range");
        const CMatrix h = state.composite(k);
        const CMatrix f = state.precoder.effective();
        require(f.rows() == h.cols(), "sinr_streams: precoder rows must equal BS antennas");
        const auto &w = state.combiners[static_cast<std::size_t>(k)];
        require(w.rows() == h.rows(), "sinr_streams: combiner rows must equal UE antennas");

        const auto offset = state.stream_offset(k);
        const auto own = w.cols();
        const auto &row = state.links[static_cast<std::size_t>(k)];

        RVector out(own);
        for (Eigen::Index s = 0; s < own; ++s)
        {
            const CVector ws = w.col(s);
            // |w^H H f_i|^2 for every stream i in the system
            const Eigen::RowVectorXcd g = ws.adjoint() * h * f;

            double desired = 0.0, interference = 0.0;
            for (Eigen::Index i = 0; i < g.size(); ++i)
            {
                const double p = std::norm(g[i]);
                if (i == offset + s)
                    desired = p;
                else
                    interference += p; // ISI when i belongs to UE k, MUI otherwise
            }

            double ris_noise = 0.0;
            for (int u = 0; u < state.num_ris(); ++u)
            {
                const auto &ls = row[static_cast<std::size_t>(u)];
                const auto &psi = state.psi[static_cast<std::size_t>(u)];
                // a passive surface only reflects, it adds no noise
                if (state.kappa(u, k) == 0 || ls.sigma_r2 == 0.0 || psi.kind() == ReflectionKind::passive_diagonal)
                    continue;
                const Eigen::RowVectorXcd fwd = psi.apply_right(ws.adjoint() * ls.h2);
                ris_noise += fwd.squaredNorm() * ls.sigma_r2;
            }

            const double noise = row.front().sigma2 * ws.squaredNorm();
            out[s] = desired / (interference + ris_noise + noise);
        }
        return out;
    }

    std::vector<RVector> all_sinrs(const SystemState &state)
    {
        std::vector<RVector> out;
        out.reserve(static_cast<std::size_t>(state.num_ues()));
        for (int k = 0; k < state.num_ues(); ++k)
            out.push_back(sinr_streams(state, k));
        return out;
    }

    double log2_1p(double x)
    {
        return std::log1p(x) / std::numbers::ln2;
    }

    double sum_rate(const std::vector<RVector> &sinrs, std::span<const double> weights, std::optional<double> bandwidth_hz)
    {
        if (!weights.empty())
            require(weights.size() == sinrs.size(), "sum_rate: one weight per UE is required");
        double total = 0.0;
        for (std::size_t k = 0; k < sinrs.size(); ++k)
        {
            double rate = 0.0;
            for (Eigen::Index s = 0; s < sinrs[k].size(); ++s)
            {
                require(sinrs[k][s] >= 0.0, "sum_rate: SINR must be non-negative");
                rate += log2_1p(sinrs[k][s]);
            }
            total += (weights.empty() ? 1.0 : weights[k]) * rate;
        }
        if (bandwidth_hz)
            total *= *bandwidth_hz;
        return total;
    }

    double state_sum_rate(const SystemState &state)
    {
        const std::optional<double> bw = state.bandwidth_hz > 0.0 ? std::optional<double>(state.bandwidth_hz) : std::nullopt;
        return sum_rate(all_sinrs(state), state.weights, bw);
    }

    double capacity_fixed_psi(const CMatrix &h, double p_max, double sigma2)
    {
        require(h.size() > 0, "capacity_fixed_psi: empty channel");
        require(p_max > 0.0 && sigma2 > 0.0, "capacity_fixed_psi: power and noise must be positive");

        Eigen::JacobiSVD<CMatrix> svd(h);
        const RVector &sv = svd.singularValues();
        require(sv.size() > 0 && sv[0] > 0.0, "capacity_fixed_psi: channel is zero");

        // Modes with non-negligible gain; each has unit cost and noise floor sigma2 / s^2
        std::vector<double> cost, floor;
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv[i] > sv[0] * 1e-12)
            {
                cost.push_back(1.0);
                floor.push_back(sigma2 / (sv[i] * sv[i]));
            }
        const RVector p = waterfill(cost, floor, p_max);

        double rate = 0.0;
        for (std::size_t i = 0; i < floor.size(); ++i)
            rate += log2_1p(p[static_cast<Eigen::Index>(i)] / floor[i]);
        return rate;
    }

    double bs_transmit_power(const Precoder &precoder)
    {
        return precoder.effective().squaredNorm();
    }

    double ris_power(const SystemState &state)
    {
        const CMatrix f = state.precoder.effective();
        double total = 0.0;
        for (int u = 0; u < state.num_ris(); ++u)
        {
            if (!state.ris_on(u))
                continue;
            const auto &ls = state.links.front()[static_cast<std::size_t>(u)];
            total += ris_transmit_power(state.psi[static_cast<std::size_t>(u)], ls.h1, f, ls.sigma_r2);
        }
        return total;
    }

    double total_power(const SystemState &state, const PowerModelParams &params)
    {
        params.validate();
        double p = bs_transmit_power(state.precoder) / params.eta + params.p_bs_circuit;
        for (int u = 0; u < state.num_ris(); ++u)
            if (state.ris_on(u))
                p += static_cast<double>(state.psi[static_cast<std::size_t>(u)].size()) * params.p_ris_element;
        for (int k = 0; k < state.num_ues(); ++k)
            p += params.ue_circuit(k);
        return p;
    }

    double energy_efficiency(const SystemState &state, const PowerModelParams &params)
    {
        const double p = total_power(state, params);
        if (!(p > 0.0))
            throw NumericalError("energy_efficiency: total power is zero");
        return state_sum_rate(state) / p;
    }

    StateMetrics evaluate_metrics(const SystemState &state, const PowerModelParams &params)
    {
        StateMetrics m;
        const auto sinrs = all_sinrs(state);
        const std::optional<double> bw = state.bandwidth_hz > 0.0 ? std::optional<double>(state.bandwidth_hz) : std::nullopt;
        m.sum_rate = sum_rate(sinrs, state.weights, bw);
        for (const auto &s : sinrs)
        {
            if (s.size() == 1)
                m.sinr_db.push_back(to_db(s[0]));
            else
                m.sinr_db.push_back(to_db(std::exp2(sum_rate({s})) - 1.0));
        }
        m.p_bs = bs_transmit_power(state.precoder);
        m.p_ris = ris_power(state);
        m.p_total = total_power(state, params);
        m.ee = m.p_total > 0.0 ? m.sum_rate / m.p_total : 0.0;
        return m;
    }
}
