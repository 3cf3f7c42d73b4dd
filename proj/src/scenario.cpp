// SPDX-License-Identifier: Apache-2.0
//
// rismm - link-level simulation and optimization for RIS-assisted mmWave downlinks
// ------------------------------------------------------------------------

#include <rismm/conceptual.hpp>
#include <rismm/scenario.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

namespace rismm
{
    namespace
    {
        void put(RunResult &r, const std::string &name, MetricValue v)
        {
            for (auto &[k, x] : r.metrics)
                if (k == name)
                {
                    x = v;
                    return;
                }
            r.metrics.emplace_back(name, v);
        }

        // Fixed metric columns, empty until filled
        void reserve_fixed(RunResult &r, int num_ues)
        {
            put(r, "sum_rate", std::nullopt);
            for (int k = 0; k < num_ues; ++k)
                put(r, "sinr_db_ue" + std::to_string(k), std::nullopt);
            for (const char *name : {"p_bs", "p_ris", "p_total", "ee"})
                put(r, name, std::nullopt);
        }

        void put_state_metrics(RunResult &r, const SystemState &state, const PowerModelParams &params)
        {
            const auto m = evaluate_metrics(state, params);
            put(r, "sum_rate", m.sum_rate);
            for (std::size_t k = 0; k < m.sinr_db.size(); ++k)
                put(r, "sinr_db_ue" + std::to_string(k), m.sinr_db[k]);
            put(r, "p_bs", m.p_bs);
            put(r, "p_ris", m.p_ris);
            put(r, "p_total", m.p_total);
            put(r, "ee", m.ee);
        }

        ScenarioConfig apply_sweep(ScenarioConfig c, double v)
        {
            if (!c.sweep)
                return c;
            const auto &name = c.sweep->variable;
            const int iv = static_cast<int>(v);
            if (name == "bs_antennas")
                c.geometry.bs_antennas = iv;
            else if (name == "ris_elements")
                for (auto &r : c.geometry.ris)
                {
                    r.nx = iv;
                    r.ny = 1;
                }
            else if (name == "num_ues")
                c.geometry.num_ues = iv;
            else if (name == "sigma2_w")
                c.geometry.sigma2 = v;
            else if (name == "sigma_r2_w")
                c.geometry.sigma_r2 = v;
            else if (name == "p_bs_max_w")
                c.budgets.p_bs_max = v;
            else if (name == "p_ris_max_w")
                c.budgets.p_ris_max = v;
            else if (name == "d1_m")
                c.conceptual.d1_m = v;
            else if (name == "d2_m")
                c.conceptual.d2_m = v;
            else if (name == "r1")
                c.conceptual.r1 = v;
            else if (name == "r2")
                c.conceptual.r2 = v;
            else if (name == "distance_m")
                c.scaling.distance_m = v;
            return c;
        }

        void trial_conceptual(const ScenarioConfig &c, RunResult &r)
        {
            using namespace conceptual;
            const auto &p = c.conceptual;
            const LinkConstants k{p.c0, p.pt_w, c.geometry.sigma2};
            const ReflectedPath p1(p.r1, p.d1_m, p.phi1_rad);
            const ReflectedPath p2(p.r2, p.d2_m, p.phi2_rad);
            put(r, "snr_free_space", snr_free_space(FreeSpaceLink(p.d1_m, p.c0, p.pt_w, c.geometry.sigma2)));
            for (auto which : all_snr_cases)
                put(r, "snr_" + std::string(to_string(which)), snr_case(which, p1, p2, k, p.amplitude_budget));
        }

        void trial_rho(const ScenarioConfig &c, double rho, RunResult &r)
        {
            const auto &p = c.rho_sweep;
            const double snr = split_snr(rho, p.a, p.b, p.m, c.geometry.sigma2);
            put(r, "sum_rate", log2_1p(snr));
            put(r, "sinr_db_ue0", to_db(snr));
            put(r, "snr", snr);
            put(r, "rho_opt", power_split_rho(p.a, p.b));
        }

        // Single-path BS->RIS and RIS->UE links without a direct path
        LinkSet single_path_links(const ScenarioConfig &c, std::uint64_t seed)
        {
            Rng rng(seed);
            std::uniform_real_distribution<double> ula(-pi / 2, pi / 2), az(-pi, pi), el(0.0, pi / 2), ph(0.0, 2 * pi);
            const auto &g = c.geometry;
            const UlaSpec bs{g.bs_antennas, g.spacing_over_lambda};
            const UpaSpec ris = g.ris.front();
            const UlaSpec ue{1, g.spacing_over_lambda};

            PathComponent p1;
            p1.gain = std::polar(c.scaling.h1_gain, ph(rng));
            p1.aod = {ula(rng), 0.0};
            const double az1 = az(rng);
            p1.aoa = {el(rng), az1};
            p1.is_los = true;
            PathComponent p2;
            p2.gain = std::polar(c.scaling.h2_gain, ph(rng));
            const double az2 = az(rng);
            p2.aod = {el(rng), az2};
            p2.aoa = {ula(rng), 0.0};
            p2.is_los = true;

            LinkSet ls;
            ls.h1 = synthesize_channel(ChannelKind::bs_ris, {p1}, bs, ris);
            ls.h2 = synthesize_channel(ChannelKind::ris_ue, {p2}, ris, ue);
            ls.h0 = CMatrix::Zero(1, g.bs_antennas);
            ls.sigma2 = g.sigma2;
            return ls;
        }

        void trial_scaling(const ScenarioConfig &c, std::uint64_t seed, RunResult &r)
        {
            using namespace conceptual;
            const auto &p = c.scaling;
            const double sigma2 = c.geometry.sigma2;
            if (c.sweep->variable == "distance_m")
            {
                put(r, "snr_free_space", snr_free_space(FreeSpaceLink(p.distance_m, p.c0, p.pt_w, sigma2)));
                const auto two = snr_two_ray(TwoRayGeometry(p.distance_m, p.ht_m, p.hr_m, p.wavelength_m), p.pt_w, sigma2);
                put(r, "snr_two_ray", two.snr_approx);
                put(r, "snr_two_ray_exact", two.snr_exact);
                put(r, "far_field", two.far_field_valid ? 1.0 : 0.0);
                return;
            }
            const auto links = single_path_links(c, seed);
            const auto design = massive_design({links}, c.budgets);
            SystemState state = design.state;
            state.bandwidth_hz = c.bandwidth_hz;
            put_state_metrics(r, state, c.power_model);
            const double n = static_cast<double>(links.ris_elements());
            const double m = static_cast<double>(links.bs_antennas());
            put(r, "snr", sinr_streams(state, 0)[0]);
            put(r, "snr_closed_form", c.budgets.p_bs_max * p.h1_gain * p.h1_gain * p.h2_gain * p.h2_gain * n * n * m / sigma2);
        }

        void trial_random(const ScenarioConfig &c, std::uint64_t seed, RunResult &r)
        {
            const Scenario sc = random_scenario(seed, c.geometry);
            OptimizerConfig opt = c.optimizer;
            opt.rng_seed = seed;

            switch (c.preset)
            {
            case Preset::single_ris_single_ue:
            case Preset::single_ris_multi_ue:
            {
                auto res = alternating_optimize(sc.for_ris(0), c.budgets, opt);
                res.state.bandwidth_hz = c.bandwidth_hz;
                r.iterations = res.trace.iterations;
                if (res.trace.failure_iteration)
                    r.status = "zf_failure";
                put_state_metrics(r, res.state, c.power_model);
                put(r, "objective", res.trace.objective.empty() ? MetricValue{} : res.trace.objective.back());
                put(r, "converged", res.trace.converged ? 1.0 : 0.0);
                break;
            }
            case Preset::massive:
            {
                auto d = massive_design(sc.for_ris(0), c.budgets, c.massive);
                d.state.bandwidth_hz = c.bandwidth_hz;
                put_state_metrics(r, d.state, c.power_model);
                for (Eigen::Index k = 0; k < d.rho.size(); ++k)
                    put(r, "rho_ue" + std::to_string(k), d.rho[k]);
                put(r, "regime_warning", d.regime_warning ? 1.0 : 0.0);
                break;
            }
            case Preset::multi_ris:
            {
                std::vector<ReflectionMatrix> pilot;
                for (const auto &spec : c.geometry.ris)
                    pilot.push_back(ReflectionMatrix::identity(spec.elements()));
                const auto kappa = associate_ues(sc.links, pilot, c.association, c.association_threshold);
                auto state = multi_ris_design(sc.links, kappa, c.budgets, opt.final_zf);
                state.bandwidth_hz = c.bandwidth_hz;
                put_state_metrics(r, state, c.power_model);
                put(r, "associations", static_cast<double>(kappa.sum()));
                break;
            }
            case Preset::ee_onoff:
            {
                auto res = ee_onoff_greedy(sc.links, c.budgets, c.power_model, c.rate_min_bps, c.bandwidth_hz, opt);
                r.iterations = res.trace.iterations;
                put_state_metrics(r, res.state, c.power_model);
                for (std::size_t u = 0; u < res.on.size(); ++u)
                    put(r, "ris_on_u" + std::to_string(u), res.on[u] ? 1.0 : 0.0);
                put(r, "ee_all_on", res.ee_all_on);
                put(r, "ee_all_off", res.ee_all_off);
                if (res.on.size() <= 8)
                {
                    const auto ex = exhaustive_onoff(sc.links, c.budgets, c.power_model, c.rate_min_bps,
                                                     c.bandwidth_hz, opt.final_zf);
                    put(r, "ee_exhaustive", ex.ee);
                    put(r, "ee_gap", ex.ee - res.trace.objective.back());
                }
                break;
            }
            default:
                throw InvalidArgument("run_trial: preset has no random pipeline");
            }
        }

        std::vector<std::optional<double>> sweep_points(const ScenarioConfig &c)
        {
            std::vector<std::optional<double>> out;
            if (c.preset == Preset::rho_sweep && (!c.sweep || c.sweep->values.empty()))
            {
                const int n = c.rho_sweep.points;
                for (int i = 0; i < n; ++i)
                    out.emplace_back(static_cast<double>(i) / (n - 1));
            }
            else if (c.sweep)
                out.assign(c.sweep->values.begin(), c.sweep->values.end());
            else
                out.emplace_back(std::nullopt);
            return out;
        }
    }

    std::vector<std::string> ResultTable::columns() const
    {
        std::vector<std::string> cols{"scenario_id", "seed", "sweep_variable", "sweep_value", "trial", "status", "iterations"};

        int max_ue = -1;
        std::vector<std::string> extras;
        std::set<std::string> seen;
        const std::set<std::string> fixed{"sum_rate", "p_bs", "p_ris", "p_total", "ee"};
        for (const auto &row : rows)
            for (const auto &[name, v] : row.metrics)
            {
                if (name.rfind("sinr_db_ue", 0) == 0)
                {
                    max_ue = std::max(max_ue, std::stoi(name.substr(10)));
                    continue;
                }
                if (fixed.count(name) || seen.count(name))
                    continue;
                seen.insert(name);
                extras.push_back(name);
            }

        cols.emplace_back("sum_rate");
        for (int k = 0; k <= max_ue; ++k)
            cols.push_back("sinr_db_ue" + std::to_string(k));
        for (const char *name : {"p_bs", "p_ris", "p_total", "ee"})
            cols.emplace_back(name);
        cols.insert(cols.end(), extras.begin(), extras.end());
        if (timing)
            cols.emplace_back("wall_time_s");
        return cols;
    }

    RunResult run_trial(const ScenarioConfig &config, std::optional<double> sweep_value, int trial)
    {
        const auto start = std::chrono::steady_clock::now();
        RunResult r;
        r.scenario_id = config.id;
        r.seed = config.seed + static_cast<std::uint64_t>(trial);
        r.sweep_value = sweep_value;
        r.trial = trial;

        ScenarioConfig c = sweep_value ? apply_sweep(config, *sweep_value) : config;
        reserve_fixed(r, c.preset == Preset::conceptual_cases ? 0 : c.geometry.num_ues);
        try
        {
            c.validate();
            switch (c.preset)
            {
            case Preset::conceptual_cases:
                trial_conceptual(c, r);
                break;
            case Preset::rho_sweep:
                trial_rho(c, sweep_value.value_or(power_split_rho(c.rho_sweep.a, c.rho_sweep.b)), r);
                break;
            case Preset::scaling_sweep:
                trial_scaling(c, r.seed, r);
                break;
            default:
                trial_random(c, r.seed, r);
                break;
            }
        }
        catch (const std::exception &e)
        {
            r.status = std::string("error: ") + e.what();
        }
        r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return r;
    }

    ResultTable run(const ScenarioConfig &config)
    {
        config.validate();
        ResultTable table;
        table.timing = config.timing;
        if (config.sweep)
            table.sweep_variable = config.sweep->variable;
        else if (config.preset == Preset::rho_sweep)
            table.sweep_variable = "rho";

        for (const auto &v : sweep_points(config))
            for (int t = 0; t < config.trials; ++t)
                table.rows.push_back(run_trial(config, v, t));

        std::stable_sort(table.rows.begin(), table.rows.end(), [](const RunResult &a, const RunResult &b)
                         {
                             if (a.sweep_value != b.sweep_value)
                                 return a.sweep_value < b.sweep_value;
                             return a.trial < b.trial; });
        return table;
    }
}
