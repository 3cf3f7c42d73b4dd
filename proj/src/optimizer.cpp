// SPDX-License-Identifier: Apache-2.0
//
// rismm - link-level simulation and optimization for RIS-assisted mmWave downlinks
// ------------------------------------------------------------------------

#include <rismm/optimizer.hpp>

#include <cmath>
#include <limits>
#include <string>

namespace rismm
{
    namespace
    {
        constexpr double neg_inf = -std::numeric_limits<double>::infinity();

        struct ZfSolution
        {
            Precoder precoder;
            RVector cost;  // a_s, squared norms of the unit-gain ZF columns
            RVector noise; // receiver plus forwarded RIS noise per stream
        };

        ZfSolution zf_solve(const SystemState &state, double p_bs_max, PowerAllocation allocation,
                            const std::optional<RVector> &fixed_beta)
        {
            const int k_count = state.num_ues();
            Eigen::Index total = 0;
            for (int k = 0; k < k_count; ++k)
                total += state.streams_of(k);
            const auto m = state.links.front().front().bs_antennas();

            CMatrix h_eff(total, m);
            RVector noise(total);
            Eigen::Index row = 0;
            for (int k = 0; k < k_count; ++k)
            {
                const CMatrix h = state.composite(k);
                const auto &w = state.combiners[static_cast<std::size_t>(k)];
                const auto &links = state.links[static_cast<std::size_t>(k)];
                for (Eigen::Index s = 0; s < w.cols(); ++s, ++row)
                {
                    const CVector ws = w.col(s);
                    h_eff.row(row) = ws.adjoint() * h;
                    double n = links.front().sigma2 * ws.squaredNorm();
                    for (int u = 0; u < state.num_ris(); ++u)
                    {
                        const auto &ls = links[static_cast<std::size_t>(u)];
                        const auto &psi = state.psi[static_cast<std::size_t>(u)];
                        if (state.kappa(u, k) != 0 && ls.sigma_r2 > 0.0 && psi.kind() != ReflectionKind::passive_diagonal)
                            n += ls.sigma_r2 * psi.apply_right(ws.adjoint() * ls.h2).squaredNorm();
                    }
                    noise[row] = n;
                }
            }

            ZfSolution out;
            out.precoder.f = zf_precoder(h_eff);
            out.cost = out.precoder.f.colwise().squaredNorm().transpose();
            out.noise = noise;
            if (fixed_beta)
            {
                require(fixed_beta->size() == total, "zf_f_step: fixed beta length must equal stream count");
                out.precoder.beta = *fixed_beta;
            }
            else if (allocation == PowerAllocation::uniform)
                out.precoder.beta = RVector::Constant(total, p_bs_max / out.cost.sum());
            else
            {
                const std::vector<double> a(out.cost.data(), out.cost.data() + total);
                const std::vector<double> nv(noise.data(), noise.data() + total);
                out.precoder.beta = waterfill(a, nv, p_bs_max);
            }
            return out;
        }

        // Sum rate of a ZF solution: every stream sees beta_s / noise_s
        double zf_rate(const SystemState &state, const ZfSolution &sol)
        {
            std::vector<RVector> sinrs;
            Eigen::Index row = 0;
            for (int k = 0; k < state.num_ues(); ++k)
            {
                RVector g(state.streams_of(k));
                for (Eigen::Index s = 0; s < g.size(); ++s, ++row)
                    g[s] = sol.precoder.beta[row] / sol.noise[row];
                sinrs.push_back(g);
            }
            const std::optional<double> bw = state.bandwidth_hz > 0.0 ? std::optional<double>(state.bandwidth_hz) : std::nullopt;
            return sum_rate(sinrs, state.weights, bw);
        }

        // Every term of the power model except the BS transmit power
        double static_power(const SystemState &state, const PowerModelParams &params)
        {
            double p = params.p_bs_circuit;
            for (int u = 0; u < state.num_ris(); ++u)
                if (state.ris_on(u))
                    p += static_cast<double>(state.psi[static_cast<std::size_t>(u)].size()) * params.p_ris_element;
            for (int k = 0; k < state.num_ues(); ++k)
                p += params.ue_circuit(k);
            return p;
        }

        void check_single_ris_links(const std::vector<LinkSet> &links, const char *who)
        {
            require(!links.empty(), std::string(who) + ": no UEs");
            for (const auto &ls : links)
            {
                ls.validate();
                require(ls.bs_antennas() == links.front().bs_antennas() && ls.ris_elements() == links.front().ris_elements(),
                        std::string(who) + ": link sets differ in BS or RIS dimension");
            }
        }

        std::vector<double> random_phases(Rng &rng, Eigen::Index n)
        {
            std::uniform_real_distribution<double> dist(0.0, 2.0 * pi);
            std::vector<double> out(static_cast<std::size_t>(n));
            for (auto &p : out)
                p = dist(rng);
            return out;
        }

        bool converged(double previous, double current, double rel_tolerance)
        {
            return std::abs(current - previous) <= rel_tolerance * std::abs(previous);
        }
    }

    std::string_view to_string(Objective o)
    {
        switch (o)
        {
        case Objective::sum_rate:
            return "sum_rate";
        case Objective::min_power:
            return "min_power";
        case Objective::energy_efficiency:
            return "energy_efficiency";
        }
        return "?";
    }

    std::optional<Objective> objective_from_string(std::string_view name)
    {
        for (auto o : {Objective::sum_rate, Objective::min_power, Objective::energy_efficiency})
            if (to_string(o) == name)
                return o;
        return std::nullopt;
    }

    std::string_view to_string(PowerAllocation a)
    {
        return a == PowerAllocation::waterfill ? "waterfill" : "uniform";
    }

    std::optional<PowerAllocation> allocation_from_string(std::string_view name)
    {
        for (auto a : {PowerAllocation::waterfill, PowerAllocation::uniform})
            if (to_string(a) == name)
                return a;
        return std::nullopt;
    }

    void OptimizerConfig::validate() const
    {
        require(max_iters >= 1, "OptimizerConfig: max_iters must be at least 1");
        require(rel_tolerance > 0.0, "OptimizerConfig: rel_tolerance must be positive");
        require(phase_grid_points >= 8, "OptimizerConfig: phase_grid_points must be at least 8");
        require(golden_steps >= 0, "OptimizerConfig: golden_steps must be non-negative");
        require(sweeps_per_step >= 1, "OptimizerConfig: sweeps_per_step must be at least 1");
        require(streams_per_ue >= 1, "OptimizerConfig: streams_per_ue must be at least 1");
        require(active_gain > 0.0, "OptimizerConfig: active_gain must be positive");
        power_model.validate();
    }

    CMatrix design_combiners(const CMatrix &h2, int streams)
    {
        require(streams >= 1 && streams <= h2.rows(), "design_combiners: streams must lie in [1, V]");
        if (h2.rows() == 1)
            return CMatrix::Ones(1, 1);
        Eigen::JacobiSVD<CMatrix> svd(h2, Eigen::ComputeThinU);
        return svd.matrixU().leftCols(streams);
    }

    Precoder zf_f_step(const SystemState &state, double p_bs_max, PowerAllocation allocation,
                       const std::optional<RVector> &fixed_beta)
    {
        require(p_bs_max > 0.0, "zf_f_step: BS power budget must be positive");
        return zf_solve(state, p_bs_max, allocation, fixed_beta).precoder;
    }

    double zf_transmit_power(const SystemState &state, const RVector &beta)
    {
        const auto sol = zf_solve(state, 1.0, PowerAllocation::uniform, beta);
        return beta.dot(sol.cost);
    }

    PsiObjective make_objective(const PowerBudget &budget, const OptimizerConfig &config,
                                const std::optional<RVector> &fixed_beta)
    {
        const double p = budget.p_bs_max;
        const auto alloc = config.allocation;
        const auto params = config.power_model;

        switch (config.objective)
        {
        case Objective::min_power:
            require(fixed_beta.has_value(), "make_objective: min_power needs a fixed beta");
            return [beta = *fixed_beta](const SystemState &s)
            {
                try
                {
                    return -zf_transmit_power(s, beta);
                }
                catch (const NumericalError &)
                {
                    return neg_inf;
                }
            };
        case Objective::sum_rate:
            if (!config.zf_constraints)
                return [](const SystemState &s) { return state_sum_rate(s); };
            return [p, alloc](const SystemState &s)
            {
                try
                {
                    return zf_rate(s, zf_solve(s, p, alloc, std::nullopt));
                }
                catch (const NumericalError &)
                {
                    return neg_inf;
                }
            };
        case Objective::energy_efficiency:
            if (!config.zf_constraints)
                return [params](const SystemState &s) { return energy_efficiency(s, params); };
            return [p, alloc, params](const SystemState &s)
            {
                try
                {
                    const auto sol = zf_solve(s, p, alloc, std::nullopt);
                    const double power = sol.precoder.beta.dot(sol.cost) / params.eta + static_power(s, params);
                    return power > 0.0 ? zf_rate(s, sol) / power : neg_inf;
                }
                catch (const NumericalError &)
                {
                    return neg_inf;
                }
            };
        }
        throw InvalidArgument("make_objective: unknown objective");
    }

    ReflectionMatrix phase_coordinate_descent(const SystemState &state, int ris, const PsiObjective &objective,
                                              const OptimizerConfig &config)
    {
        config.validate();
        require(ris >= 0 && ris < state.num_ris(), "phase_coordinate_descent: RIS index out of range");
        const auto idx = static_cast<std::size_t>(ris);
        require(state.psi[idx].is_diagonal(), "phase_coordinate_descent: reflection matrix must be diagonal");

        SystemState work = state;
        const ReflectionMatrix base = state.psi[idx];
        CVector d = base.diagonal();
        double best = objective(work);

        const double step = 2.0 * pi / config.phase_grid_points;
        const double golden = (std::sqrt(5.0) - 1.0) / 2.0;

        for (int sweep = 0; sweep < config.sweeps_per_step; ++sweep)
            for (Eigen::Index n = 0; n < d.size(); ++n)
            {
                const double mag = std::abs(d[n]);
                if (mag == 0.0)
                    continue;
                const cdouble incumbent = d[n];
                const double start = std::arg(incumbent);

                auto eval = [&](double theta)
                {
                    d[n] = std::polar(mag, theta);
                    work.psi[idx] = base.with_diagonal(d);
                    return objective(work);
                };

                // grid anchored at the incumbent; j = 0 is the incumbent itself
                double grid_best = best, grid_theta = start;
                for (int j = 1; j < config.phase_grid_points; ++j)
                {
                    const double theta = start + j * step;
                    const double v = eval(theta);
                    if (v > grid_best)
                    {
                        grid_best = v;
                        grid_theta = theta;
                    }
                }

                double cand_best = grid_best, cand_theta = grid_theta;
                double lo = grid_theta - step, hi = grid_theta + step;
                double x1 = hi - golden * (hi - lo), x2 = lo + golden * (hi - lo);
                double f1 = eval(x1), f2 = eval(x2);
                for (int it = 0; it < config.golden_steps; ++it)
                {
                    if (f1 > cand_best)
                    {
                        cand_best = f1;
                        cand_theta = x1;
                    }
                    if (f2 > cand_best)
                    {
                        cand_best = f2;
                        cand_theta = x2;
                    }
                    if (f1 >= f2)
                    {
                        hi = x2;
                        x2 = x1;
                        f2 = f1;
                        x1 = hi - golden * (hi - lo);
                        f1 = eval(x1);
                    }
                    else
                    {
                        lo = x1;
                        x1 = x2;
                        f1 = f2;
                        x2 = lo + golden * (hi - lo);
                        f2 = eval(x2);
                    }
                }
                for (auto [x, f] : {std::pair{x1, f1}, std::pair{x2, f2}})
                    if (f > cand_best)
                    {
                        cand_best = f;
                        cand_theta = x;
                    }

                if (cand_best > best)
                {
                    best = cand_best;
                    d[n] = std::polar(mag, cand_theta);
                }
                else
                    d[n] = incumbent;
                work.psi[idx] = base.with_diagonal(d);
            }
        return work.psi[idx];
    }

    namespace
    {
        // Alternating loop from a state whose Psi is already initialized
        OptimizationResult run_alternating(SystemState state, const PowerBudget &budget, const OptimizerConfig &config)
        {
            OptimizationTrace trace;
            trace.seed = config.rng_seed;
            const bool min_power = config.objective == Objective::min_power;
            const double sign = min_power ? -1.0 : 1.0;

            try
            {
                state.precoder = zf_f_step(state, budget.p_bs_max, config.allocation);
            }
            catch (const NumericalError &e)
            {
                trace.failure_iteration = 0;
                trace.failure = e.what();
                return {std::move(state), std::move(trace)};
            }

            std::optional<RVector> fixed_beta;
            if (min_power)
                fixed_beta = state.precoder.beta;
            const auto objective = make_objective(budget, config, fixed_beta);
            const bool rederive = config.zf_constraints || min_power;

            double current = objective(state);
            trace.objective.push_back(sign * current);

            for (int it = 1; it <= config.max_iters; ++it)
            {
                SystemState cand = state;
                cand.psi.front() = phase_coordinate_descent(state, 0, objective, config);
                try
                {
                    Precoder f = zf_f_step(cand, budget.p_bs_max, config.allocation, fixed_beta);
                    if (rederive)
                        cand.precoder = std::move(f);
                    else
                    {
                        SystemState alt = cand;
                        alt.precoder = std::move(f);
                        if (objective(alt) > objective(cand))
                            cand = std::move(alt);
                    }
                }
                catch (const NumericalError &e)
                {
                    trace.failure_iteration = it;
                    trace.failure = e.what();
                    break;
                }

                const double value = objective(cand);
                state = std::move(cand);
                trace.iterations = it;
                trace.objective.push_back(sign * value);
                if (converged(current, value, config.rel_tolerance))
                {
                    trace.converged = true;
                    break;
                }
                current = value;
            }
            return {std::move(state), std::move(trace)};
        }

        SystemState initial_state(const std::vector<LinkSet> &links, ReflectionMatrix psi, int streams)
        {
            std::vector<CMatrix> combiners;
            for (const auto &ls : links)
                combiners.push_back(design_combiners(ls.h2, streams));
            const auto m = links.front().bs_antennas();
            const auto total = static_cast<Eigen::Index>(links.size()) * streams;
            Precoder zero{CMatrix::Zero(m, total), RVector::Zero(total), std::nullopt};
            return SystemState::single_ris(links, std::move(psi), std::move(zero), std::move(combiners));
        }

        void check_zf_dimensions(const std::vector<LinkSet> &links, int streams, const char *who)
        {
            const auto k = static_cast<Eigen::Index>(links.size());
            require(k * streams <= links.front().bs_antennas(), std::string(who) + ": more streams than BS antennas");
            require(k <= links.front().ris_elements(), std::string(who) + ": more UEs than RIS elements");
        }
    }

    OptimizationResult alternating_optimize(const std::vector<LinkSet> &links, const PowerBudget &budget,
                                            const OptimizerConfig &config)
    {
        config.validate();
        budget.validate();
        require(budget.p_bs_max > 0.0, "alternating_optimize: BS power budget must be positive");
        check_single_ris_links(links, "alternating_optimize");
        check_zf_dimensions(links, config.streams_per_ue, "alternating_optimize");

        Rng rng(config.rng_seed);
        auto psi = ReflectionMatrix::passive(random_phases(rng, links.front().ris_elements()));
        return run_alternating(initial_state(links, std::move(psi), config.streams_per_ue), budget, config);
    }

    MassiveDesign massive_design(const std::vector<LinkSet> &links, const PowerBudget &budget,
                                 const MassiveOptions &options)
    {
        budget.validate();
        require(budget.p_bs_max > 0.0, "massive_design: BS power budget must be positive");
        check_single_ris_links(links, "massive_design");
        const int k_count = static_cast<int>(links.size());
        const auto m = links.front().bs_antennas();
        const auto n = links.front().ris_elements();
        for (const auto &ls : links)
            require(ls.ue_antennas() == 1, "massive_design: UEs must have a single antenna");

        MassiveDesign out;
        out.regime_warning = m < 8 * k_count || n < 8 * k_count;

        // per-UE DPL and RPL designs
        std::vector<CVector> f_dpl, f_rpl;
        std::vector<double> a(static_cast<std::size_t>(k_count));
        for (int k = 0; k < k_count; ++k)
        {
            const auto &ls = links[static_cast<std::size_t>(k)];
            const CVector h0 = ls.h0.row(0).transpose();
            const CVector h2 = ls.h2.row(0).transpose();
            a[static_cast<std::size_t>(k)] = h0.norm();
            f_dpl.push_back(h0.norm() > 0.0 ? mf_precoder(h0) : CVector::Zero(m));
            const auto beam = best_rpl_beam(h2, ls.h1);
            f_rpl.push_back(beam.f);
            out.per_ue_psi.push_back(coherent_phases_given_beam(h2, ls.h1, beam.f).psi);
        }

        ReflectionMatrix joint = ReflectionMatrix::identity(n);
        if (options.combine == CombineMethod::average)
            joint = combine_psi_average(out.per_ue_psi, options.active ? CombineMode::active_budget(budget.p_ris_max)
                                                                        : CombineMode::passive());
        else
        {
            const auto assignment = options.assignment.empty() ? default_partition(n, k_count) : options.assignment;
            joint = combine_psi_partition(out.per_ue_psi, assignment);
        }

        CMatrix f(m, k_count);
        out.rho.resize(k_count);
        for (int k = 0; k < k_count; ++k)
        {
            const auto &ls = links[static_cast<std::size_t>(k)];
            const Eigen::RowVectorXcd g = joint.apply_right(ls.h2) * ls.h1;
            CVector fr = f_rpl[static_cast<std::size_t>(k)];
            if (k_count > 1)
            {
                if (joint.kind() == ReflectionKind::active_diagonal)
                {
                    // linear combining keeps the beam; only re-align its phase with the DPL
                    const cdouble c = (g * fr)(0, 0);
                    if (std::abs(c) > 0.0)
                        fr *= std::conj(c) / std::abs(c);
                }
                else if (g.norm() > 0.0)
                    fr = g.adjoint() / g.norm();
            }
            const double b = std::abs((g * fr)(0, 0));
            const double ak = a[static_cast<std::size_t>(k)];
            if (!(ak + b > 0.0))
                throw NumericalError("massive_design: UE " + std::to_string(k) + " has no usable link");
            const double rho = power_split_rho(ak, b);
            out.rho[k] = rho;
            const std::vector<double> rhos{rho, 1.0 - rho};
            CVector fk = compose_split_precoder({f_dpl[static_cast<std::size_t>(k)], fr}, rhos);
            f.col(k) = fk / fk.norm();
        }

        Precoder precoder{f, RVector::Constant(k_count, budget.p_bs_max / k_count), std::nullopt};
        out.state = SystemState::single_ris(links, joint, std::move(precoder));
        if (options.final_zf)
            out.state.precoder = zf_f_step(out.state, budget.p_bs_max, PowerAllocation::uniform);
        return out;
    }

    OptimizationResult zf_active_ris_iterate(const std::vector<LinkSet> &links, const PowerBudget &budget,
                                             const OptimizerConfig &config)
    {
        config.validate();
        budget.validate();
        require(budget.p_bs_max > 0.0, "zf_active_ris_iterate: BS power budget must be positive");
        require(budget.p_ris_max > 0.0, "zf_active_ris_iterate: RIS power budget must be positive");
        require(config.objective == Objective::sum_rate, "zf_active_ris_iterate: only the sum-rate objective is supported");
        check_single_ris_links(links, "zf_active_ris_iterate");
        check_zf_dimensions(links, config.streams_per_ue, "zf_active_ris_iterate");

        const double p_r = budget.p_ris_max;
        const std::optional<double> stored_budget = std::isfinite(p_r) ? std::optional<double>(p_r) : std::nullopt;

        CVector d;
        if (config.warm_start)
        {
            OptimizerConfig passive = config;
            passive.zf_constraints = true;
            d = alternating_optimize(links, budget, passive).state.psi.front().diagonal() * config.active_gain;
        }
        else
        {
            Rng rng(config.rng_seed);
            const auto phases = random_phases(rng, links.front().ris_elements());
            d.resize(static_cast<Eigen::Index>(phases.size()));
            for (std::size_t i = 0; i < phases.size(); ++i)
                d[static_cast<Eigen::Index>(i)] = std::polar(config.active_gain, phases[i]);
        }

        SystemState state = initial_state(links, ReflectionMatrix::active(d, stored_budget), config.streams_per_ue);

        // score of a candidate under ZF; -inf when ZF fails or the RIS budget is broken
        auto score = [&](const SystemState &s, Precoder *precoder_out)
        {
            try
            {
                auto sol = zf_solve(s, budget.p_bs_max, config.allocation, std::nullopt);
                const CMatrix fe = sol.precoder.effective();
                const auto &ls = s.links.front().front();
                if (ris_transmit_power(s.psi.front(), ls.h1, fe, ls.sigma_r2) > p_r)
                    return neg_inf;
                const double r = zf_rate(s, sol);
                if (precoder_out)
                    *precoder_out = std::move(sol.precoder);
                return r;
            }
            catch (const NumericalError &)
            {
                return neg_inf;
            }
        };
        auto scaled = [&](const SystemState &s, double c)
        {
            SystemState t = s;
            t.psi.front() = s.psi.front().with_diagonal(s.psi.front().diagonal() * c);
            return t;
        };

        // projection of the initial point: largest common scale in (0, 1] meeting the RIS budget
        if (score(state, nullptr) == neg_inf)
        {
            double lo = 0.0, hi = 1.0;
            for (int j = 1; j <= 60; ++j)
            {
                const double c = std::ldexp(1.0, -j);
                if (score(scaled(state, c), nullptr) > neg_inf)
                {
                    lo = c;
                    break;
                }
                hi = c;
            }
            if (lo == 0.0)
                throw InvalidArgument("zf_active_ris_iterate: power budgets are infeasible");
            for (int it = 0; it < 60; ++it)
            {
                const double mid = 0.5 * (lo + hi);
                if (score(scaled(state, mid), nullptr) > neg_inf)
                    lo = mid;
                else
                    hi = mid;
            }
            state = scaled(state, lo);
        }

        OptimizationTrace trace;
        trace.seed = config.rng_seed;
        double current = score(state, &state.precoder);
        trace.objective.push_back(current);

        const PsiObjective objective = [&](const SystemState &s) { return score(s, nullptr); };
        for (int it = 1; it <= config.max_iters; ++it)
        {
            SystemState cand = state;
            cand.psi.front() = phase_coordinate_descent(state, 0, objective, config);
            double value = score(cand, nullptr);

            if (config.optimize_gain)
            {
                double best_c = 1.0, best_v = value;
                const double ratio = std::exp2(0.25);
                for (int j = -8; j <= 8; ++j)
                {
                    if (j == 0)
                        continue;
                    const double c = std::exp2(0.25 * j);
                    const double v = score(scaled(cand, c), nullptr);
                    if (v > best_v)
                    {
                        best_v = v;
                        best_c = c;
                    }
                }
                // the budget boundary often lies between two grid factors
                if (score(scaled(cand, best_c * ratio), nullptr) == neg_inf)
                {
                    double lo = best_c, hi = best_c * ratio;
                    for (int b = 0; b < 40; ++b)
                    {
                        const double mid = 0.5 * (lo + hi);
                        if (score(scaled(cand, mid), nullptr) > neg_inf)
                            lo = mid;
                        else
                            hi = mid;
                    }
                    const double v = score(scaled(cand, lo), nullptr);
                    if (v > best_v)
                    {
                        best_v = v;
                        best_c = lo;
                    }
                }
                if (best_c != 1.0)
                {
                    cand = scaled(cand, best_c);
                    value = best_v;
                }
            }

            if (!(value >= current))
            {
                // no admissible improvement; the incumbent stays
                trace.iterations = it;
                trace.objective.push_back(current);
                trace.converged = true;
                break;
            }
            score(cand, &cand.precoder);
            state = std::move(cand);
            trace.iterations = it;
            trace.objective.push_back(value);
            if (converged(current, value, config.rel_tolerance))
            {
                trace.converged = true;
                break;
            }
            current = value;
        }
        return {std::move(state), std::move(trace)};
    }
}
