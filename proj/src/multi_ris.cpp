// SPDX-License-Identifier: Apache-2.0
//
// rismm - link-level simulation and optimization for RIS-assisted mmWave downlinks
// ------------------------------------------------------------------------

#include <rismm/optimizer.hpp>

#include <cmath>
#include <string>

namespace rismm
{
    namespace
    {
        void check_links(const std::vector<std::vector<LinkSet>> &links, const char *who)
        {
            require(!links.empty(), std::string(who) + ": no UEs");
            const auto u_count = links.front().size();
            require(u_count >= 1, std::string(who) + ": at least one RIS is required");
            for (const auto &row : links)
            {
                require(row.size() == u_count, std::string(who) + ": every UE needs one link set per RIS");
                for (std::size_t u = 0; u < u_count; ++u)
                {
                    row[u].validate();
                    require(row[u].bs_antennas() == links.front().front().bs_antennas(),
                            std::string(who) + ": BS antenna count differs between link sets");
                    require(row[u].ris_elements() == links.front()[u].ris_elements(),
                            std::string(who) + ": RIS size differs between UEs");
                }
            }
        }

        double reflected_gain(const LinkSet &ls, const ReflectionMatrix &psi)
        {
            return (psi.apply_right(ls.h2) * ls.h1).norm();
        }
    }

    Eigen::MatrixXi associate_ues(const std::vector<std::vector<LinkSet>> &links,
                                  const std::vector<ReflectionMatrix> &psi_per_ris, AssociationPolicy policy,
                                  double threshold)
    {
        check_links(links, "associate_ues");
        const int u_count = static_cast<int>(psi_per_ris.size());
        require(u_count == static_cast<int>(links.front().size()), "associate_ues: one reflection matrix per RIS is required");
        require(threshold >= 0.0 && threshold <= 1.0, "associate_ues: threshold must lie in [0,1]");
        const int k_count = static_cast<int>(links.size());

        Eigen::MatrixXi kappa = Eigen::MatrixXi::Zero(u_count, k_count);
        for (int k = 0; k < k_count; ++k)
        {
            RVector gain(u_count);
            int best = 0;
            for (int u = 0; u < u_count; ++u)
            {
                gain[u] = reflected_gain(links[static_cast<std::size_t>(k)][static_cast<std::size_t>(u)],
                                         psi_per_ris[static_cast<std::size_t>(u)]);
                if (gain[u] > gain[best])
                    best = u;
            }
            if (!(gain[best] > 0.0))
                continue;
            if (policy == AssociationPolicy::single_best)
                kappa(best, k) = 1;
            else
                for (int u = 0; u < u_count; ++u)
                    if (gain[u] > 0.0 && gain[u] >= threshold * gain[best])
                        kappa(u, k) = 1;
        }
        return kappa;
    }

    SystemState multi_ris_design(const std::vector<std::vector<LinkSet>> &links, const Eigen::MatrixXi &kappa,
                                 const PowerBudget &budget, bool final_zf)
    {
        check_links(links, "multi_ris_design");
        budget.validate();
        require(budget.p_bs_max > 0.0, "multi_ris_design: BS power budget must be positive");
        const int k_count = static_cast<int>(links.size());
        const int u_count = static_cast<int>(links.front().size());
        require(kappa.rows() == u_count && kappa.cols() == k_count, "multi_ris_design: kappa must be U x K");
        const auto m = links.front().front().bs_antennas();
        for (const auto &row : links)
            require(row.front().ue_antennas() == 1, "multi_ris_design: UEs must have a single antenna");

        // common reflection matrix per RIS from the coherent designs of its UEs
        std::vector<ReflectionMatrix> psi;
        for (int u = 0; u < u_count; ++u)
        {
            const auto &h1 = links.front()[static_cast<std::size_t>(u)].h1;
            std::vector<ReflectionMatrix> per_ue;
            for (int k = 0; k < k_count; ++k)
            {
                if (kappa(u, k) == 0)
                    continue;
                const auto &ls = links[static_cast<std::size_t>(k)][static_cast<std::size_t>(u)];
                const CVector h2 = ls.h2.row(0).transpose();
                if (h2.norm() == 0.0 || ls.h1.norm() == 0.0)
                    continue;
                const auto beam = best_rpl_beam(h2, ls.h1);
                per_ue.push_back(coherent_phases_given_beam(h2, ls.h1, beam.f).psi);
            }
            if (per_ue.empty())
                psi.push_back(ReflectionMatrix::identity(h1.rows()));
            else
            {
                try
                {
                    psi.push_back(combine_psi_average(per_ue, CombineMode::passive()));
                }
                catch (const NumericalError &)
                {
                    // phasors cancel somewhere; split the elements instead
                    const auto assignment = default_partition(h1.rows(), static_cast<int>(per_ue.size()));
                    psi.push_back(combine_psi_partition(per_ue, assignment));
                }
            }
        }

        // MRC split over the DPL and the associated RPLs
        CMatrix f(m, k_count);
        for (int k = 0; k < k_count; ++k)
        {
            const auto &row = links[static_cast<std::size_t>(k)];
            std::vector<CVector> parts;
            std::vector<double> lambdas;
            const CVector h0 = row.front().h0.row(0).transpose();
            lambdas.push_back(h0.norm());
            parts.push_back(h0.norm() > 0.0 ? mf_precoder(h0) : CVector::Zero(m));
            for (int u = 0; u < u_count; ++u)
            {
                if (kappa(u, k) == 0)
                    continue;
                const auto &ls = row[static_cast<std::size_t>(u)];
                const Eigen::RowVectorXcd g = psi[static_cast<std::size_t>(u)].apply_right(ls.h2) * ls.h1;
                lambdas.push_back(g.norm());
                parts.push_back(g.norm() > 0.0 ? CVector(g.adjoint() / g.norm()) : CVector::Zero(m));
            }

            double total = 0.0;
            for (double l : lambdas)
                total += l * l;
            if (!(total > 0.0))
            {
                // nothing reaches this UE; any unit beam will do
                f.col(k) = CVector::Unit(m, 0);
                continue;
            }
            const auto alloc = multi_ris_power_alloc(lambdas);
            const std::vector<double> rhos(alloc.rho.data(), alloc.rho.data() + alloc.rho.size());
            const CVector fk = compose_split_precoder(parts, rhos);
            f.col(k) = fk / fk.norm();
        }

        SystemState state;
        state.links = links;
        state.psi = std::move(psi);
        state.precoder = Precoder{f, RVector::Constant(k_count, budget.p_bs_max / k_count), std::nullopt};
        state.combiners.assign(static_cast<std::size_t>(k_count), CMatrix::Ones(1, 1));
        state.kappa = kappa;
        if (final_zf && k_count > 1)
            state.precoder = zf_f_step(state, budget.p_bs_max, PowerAllocation::uniform);
        return state;
    }

    OnOffEvaluation evaluate_onoff_pattern(const std::vector<std::vector<LinkSet>> &links,
                                           const std::vector<bool> &on, const PowerBudget &budget,
                                           const PowerModelParams &params, const std::vector<double> &rate_mins,
                                           double bandwidth_hz, bool final_zf)
    {
        check_links(links, "evaluate_onoff_pattern");
        const int k_count = static_cast<int>(links.size());
        const int u_count = static_cast<int>(links.front().size());
        require(static_cast<int>(on.size()) == u_count, "evaluate_onoff_pattern: one on-off flag per RIS is required");
        require(rate_mins.empty() || rate_mins.size() == 1 || static_cast<int>(rate_mins.size()) == k_count,
                "evaluate_onoff_pattern: rate targets must be empty, a single value or one per UE");
        require(bandwidth_hz >= 0.0, "evaluate_onoff_pattern: bandwidth must be non-negative");
        params.validate();

        Eigen::MatrixXi kappa(u_count, k_count);
        for (int u = 0; u < u_count; ++u)
            kappa.row(u).setConstant(on[static_cast<std::size_t>(u)] ? 1 : 0);

        OnOffEvaluation out;
        try
        {
            out.state = multi_ris_design(links, kappa, budget, final_zf);
        }
        catch (const NumericalError &)
        {
            return out;
        }
        out.state.bandwidth_hz = bandwidth_hz;

        const double scale = bandwidth_hz > 0.0 ? bandwidth_hz : 1.0;
        bool feasible = bs_transmit_power(out.state.precoder) <= budget.p_bs_max * (1.0 + 1e-9);
        const auto sinrs = all_sinrs(out.state);
        for (int k = 0; k < k_count; ++k)
        {
            const double target = rate_mins.empty() ? 0.0 : rate_mins[rate_mins.size() == 1 ? 0 : static_cast<std::size_t>(k)];
            const double rate = scale * log2_1p(sinrs[static_cast<std::size_t>(k)][0]);
            feasible = feasible && rate >= target;
        }
        out.sum_rate = state_sum_rate(out.state);
        const double p = total_power(out.state, params);
        out.ee = p > 0.0 ? out.sum_rate / p : 0.0;
        out.feasible = feasible;
        return out;
    }

    OnOffResult ee_onoff_greedy(const std::vector<std::vector<LinkSet>> &links, const PowerBudget &budget,
                                const PowerModelParams &params, const std::vector<double> &rate_mins,
                                double bandwidth_hz, const OptimizerConfig &config)
    {
        config.validate();
        check_links(links, "ee_onoff_greedy");
        const auto u_count = links.front().size();

        auto eval = [&](const std::vector<bool> &on)
        { return evaluate_onoff_pattern(links, on, budget, params, rate_mins, bandwidth_hz, config.final_zf); };

        OnOffResult out;
        out.on.assign(u_count, true);
        auto current = eval(out.on);
        if (!current.feasible)
            throw InvalidArgument("ee_onoff_greedy: rate targets are infeasible even with every RIS on");
        out.ee_all_on = current.ee;
        out.trace.seed = config.rng_seed;
        out.trace.objective.push_back(current.ee);

        for (;;)
        {
            std::optional<std::size_t> flip;
            OnOffEvaluation best;
            double best_ee = current.ee;
            for (std::size_t u = 0; u < u_count; ++u)
            {
                auto on = out.on;
                on[u] = !on[u];
                auto cand = eval(on);
                if (cand.feasible && cand.ee > best_ee)
                {
                    best_ee = cand.ee;
                    best = std::move(cand);
                    flip = u;
                }
            }
            if (!flip)
                break;
            out.on[*flip] = !out.on[*flip];
            current = std::move(best);
            ++out.trace.iterations;
            out.trace.objective.push_back(current.ee);
        }
        out.trace.converged = true;

        const std::vector<bool> none(u_count, false);
        auto off = eval(none);
        if (off.feasible)
        {
            out.ee_all_off = off.ee;
            if (off.ee > current.ee)
            {
                out.on = none;
                current = std::move(off);
                ++out.trace.iterations;
                out.trace.objective.push_back(current.ee);
            }
        }
        out.state = std::move(current.state);
        return out;
    }

    ExhaustiveOnOff exhaustive_onoff(const std::vector<std::vector<LinkSet>> &links, const PowerBudget &budget,
                                     const PowerModelParams &params, const std::vector<double> &rate_mins,
                                     double bandwidth_hz, bool final_zf)
    {
        check_links(links, "exhaustive_onoff");
        const auto u_count = links.front().size();
        require(u_count <= 16, "exhaustive_onoff: too many RISs for enumeration");

        ExhaustiveOnOff out;
        for (std::size_t mask = 0; mask < (std::size_t{1} << u_count); ++mask)
        {
            std::vector<bool> on(u_count);
            for (std::size_t u = 0; u < u_count; ++u)
                on[u] = ((mask >> u) & 1U) != 0;
            const auto ev = evaluate_onoff_pattern(links, on, budget, params, rate_mins, bandwidth_hz, final_zf);
            if (ev.feasible && (!out.any_feasible || ev.ee > out.ee))
            {
                out.any_feasible = true;
                out.ee = ev.ee;
                out.on = on;
            }
        }
        return out;
    }
}
