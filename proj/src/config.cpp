// SPDX-License-Identifier: Apache-2.0
//
// rismm - link-level simulation and optimization for RIS-assisted mmWave downlinks
// ------------------------------------------------------------------------

#include <rismm/conceptual.hpp>
#include <rismm/scenario.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace rismm
{
    using nlohmann::json;

    std::string_view to_string(Preset p)
    {
        switch (p)
        {
        case Preset::conceptual_cases:
            return "conceptual_cases";
        case Preset::single_ris_single_ue:
            return "single_ris_single_ue";
        case Preset::single_ris_multi_ue:
            return "single_ris_multi_ue";
        case Preset::massive:
            return "massive";
        case Preset::multi_ris:
            return "multi_ris";
        case Preset::ee_onoff:
            return "ee_onoff";
        case Preset::rho_sweep:
            return "rho_sweep";
        case Preset::scaling_sweep:
            return "scaling_sweep";
        }
        return "?";
    }

    std::optional<Preset> preset_from_string(std::string_view name)
    {
        for (auto p : all_presets)
            if (to_string(p) == name)
                return p;
        return std::nullopt;
    }

    std::string_view preset_description(Preset p)
    {
        switch (p)
        {
        case Preset::conceptual_cases:
            return "closed-form SNR of the free-space link and the two-reflector cases";
        case Preset::single_ris_single_ue:
            return "one RIS, one UE, alternating F/Psi optimization";
        case Preset::single_ris_multi_ue:
            return "one RIS, K UEs, alternating ZF/Psi optimization";
        case Preset::massive:
            return "massive-regime per-UE design with a joint reflection matrix";
        case Preset::multi_ris:
            return "U RISs, UE association and MRC power split";
        case Preset::ee_onoff:
            return "greedy RIS on-off selection for energy efficiency";
        case Preset::rho_sweep:
            return "SNR versus the DPL/RPL power split";
        case Preset::scaling_sweep:
            return "SNR versus distance, RIS size or BS array size";
        }
        return "";
    }

    std::vector<std::string> sweep_variables(Preset preset)
    {
        switch (preset)
        {
        case Preset::conceptual_cases:
            return {"d1_m", "d2_m", "r1", "r2", "sigma2_w"};
        case Preset::rho_sweep:
            return {"rho"};
        case Preset::scaling_sweep:
            return {"distance_m", "ris_elements", "bs_antennas"};
        default:
            return {"bs_antennas", "ris_elements", "num_ues", "sigma2_w", "sigma_r2_w", "p_bs_max_w", "p_ris_max_w"};
        }
    }

    ScenarioConfig default_config(Preset preset)
    {
        ScenarioConfig c;
        c.preset = preset;
        c.id = std::string(to_string(preset));
        auto &g = c.geometry;
        g.ris = {UpaSpec{4, 4}};
        switch (preset)
        {
        case Preset::conceptual_cases:
        case Preset::rho_sweep:
            break;
        case Preset::single_ris_single_ue:
            g.bs_antennas = 4;
            g.num_ues = 1;
            break;
        case Preset::single_ris_multi_ue:
            g.bs_antennas = 8;
            g.num_ues = 2;
            break;
        case Preset::massive:
            g.bs_antennas = 64;
            g.ris = {UpaSpec{8, 8}};
            g.num_ues = 2;
            break;
        case Preset::multi_ris:
            g.bs_antennas = 16;
            g.ris = {UpaSpec{4, 4}, UpaSpec{4, 4}, UpaSpec{4, 4}};
            g.num_ues = 3;
            break;
        case Preset::ee_onoff:
            g.bs_antennas = 16;
            g.ris = {UpaSpec{4, 4}, UpaSpec{4, 4}, UpaSpec{4, 4}};
            g.num_ues = 2;
            c.power_model = PowerModelParams{0.5, 1.0, 0.01, {0.1}};
            break;
        case Preset::scaling_sweep:
            g.bs_antennas = 4;
            c.sweep = SweepSpec{"ris_elements", {8, 16, 32}};
            break;
        }
        return c;
    }

    namespace
    {
        // JSON object reader that remembers which keys were consumed
        class Node
        {
        public:
            Node(const json &j, std::string path) : j_(j), path_(std::move(path))
            {
                if (!j_.is_object())
                    fail("expected an object");
            }

            bool has(const std::string &key) const { return j_.contains(key); }

            void read(const std::string &key, double &out)
            {
                if (const json *v = take(key))
                {
                    if (!v->is_number())
                        fail_at(key, "expected a number");
                    out = v->get<double>();
                }
            }

            void read(const std::string &key, int &out)
            {
                if (const json *v = take(key))
                {
                    if (!v->is_number_integer())
                        fail_at(key, "expected an integer");
                    const auto x = v->get<std::int64_t>();
                    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
                        fail_at(key, "integer out of range");
                    out = static_cast<int>(x);
                }
            }

            void read(const std::string &key, std::uint64_t &out)
            {
                if (const json *v = take(key))
                {
                    if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() && v->get<std::int64_t>() < 0))
                        fail_at(key, "expected a non-negative integer");
                    out = v->get<std::uint64_t>();
                }
            }

            void read(const std::string &key, bool &out)
            {
                if (const json *v = take(key))
                {
                    if (!v->is_boolean())
                        fail_at(key, "expected true or false");
                    out = v->get<bool>();
                }
            }

            void read(const std::string &key, std::string &out)
            {
                if (const json *v = take(key))
                {
                    if (!v->is_string())
                        fail_at(key, "expected a string");
                    out = v->get<std::string>();
                }
            }

            void read(const std::string &key, std::vector<double> &out)
            {
                if (const json *v = take(key))
                {
                    if (v->is_number())
                    {
                        out = {v->get<double>()};
                        return;
                    }
                    if (!v->is_array())
                        fail_at(key, "expected a number or an array of numbers");
                    out.clear();
                    for (std::size_t i = 0; i < v->size(); ++i)
                    {
                        if (!(*v)[i].is_number())
                            fail_at(key + "[" + std::to_string(i) + "]", "expected a number");
                        out.push_back((*v)[i].get<double>());
                    }
                }
            }

            std::optional<Node> child(const std::string &key)
            {
                if (const json *v = take(key))
                    return Node(*v, sub(key));
                return std::nullopt;
            }

            const json *array(const std::string &key)
            {
                const json *v = take(key);
                if (v && !v->is_array())
                    fail_at(key, "expected an array");
                return v;
            }

            // Rejects every key that was not read
            void finish() const
            {
                for (auto it = j_.begin(); it != j_.end(); ++it)
                    if (!used_.count(it.key()))
                        throw ConfigError(sub(it.key()) + ": unknown key");
            }

            std::string sub(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }

            [[noreturn]] void fail(const std::string &what) const
            {
                throw ConfigError((path_.empty() ? std::string("<root>") : path_) + ": " + what);
            }

            [[noreturn]] void fail_at(const std::string &key, const std::string &what) const
            {
                throw ConfigError(sub(key) + ": " + what);
            }

        private:
            const json *take(const std::string &key)
            {
                if (!j_.contains(key))
                    return nullptr;
                used_.insert(key);
                return &j_.at(key);
            }

            const json &j_;
            std::string path_;
            std::set<std::string> used_;
        };

        template <typename Enum, typename Parse>
        void read_enum(Node &node, const std::string &key, Enum &out, Parse parse)
        {
            std::string name;
            node.read(key, name);
            if (name.empty())
                return;
            const auto v = parse(name);
            if (!v)
                throw ConfigError(node.sub(key) + ": unknown value '" + name + "'");
            out = *v;
        }

        void read_geometry(Node &n, ScenarioConfig &c)
        {
            auto &g = c.geometry;
            n.read("bs_antennas", g.bs_antennas);
            n.read("ue_antennas", g.ue_antennas);
            n.read("streams_per_ue", c.streams_per_ue);
            n.read("num_ues", g.num_ues);
            n.read("blockage", g.blockage);
            n.read("spacing_over_lambda", g.spacing_over_lambda);
            if (const json *ris = n.array("ris"))
            {
                g.ris.clear();
                for (std::size_t i = 0; i < ris->size(); ++i)
                {
                    Node r((*ris)[i], n.sub("ris[" + std::to_string(i) + "]"));
                    UpaSpec spec;
                    r.read("nx", spec.nx);
                    r.read("ny", spec.ny);
                    r.read("dx_over_lambda", spec.dx_over_lambda);
                    r.read("dy_over_lambda", spec.dy_over_lambda);
                    r.finish();
                    g.ris.push_back(spec);
                }
            }
            if (auto p = n.child("paths"))
            {
                p->read("direct", g.direct_nlos_paths);
                p->read("bs_ris", g.bs_ris_nlos_paths);
                p->read("ris_ue", g.ris_ue_nlos_paths);
                p->finish();
            }
            if (auto gm = n.child("gain"))
            {
                gm->read("nlos_variance", g.gain.nlos_variance);
                gm->read("los_k_factor", g.gain.los_k_factor);
                gm->read("direct_scale", g.gain.direct_scale);
                gm->read("bs_ris_scale", g.gain.bs_ris_scale);
                gm->read("ris_ue_scale", g.gain.ris_ue_scale);
                gm->finish();
            }
            n.finish();
        }

        void read_optimizer(Node &n, OptimizerConfig &o)
        {
            n.read("max_iters", o.max_iters);
            n.read("rel_tolerance", o.rel_tolerance);
            n.read("phase_grid_points", o.phase_grid_points);
            n.read("golden_steps", o.golden_steps);
            n.read("sweeps_per_step", o.sweeps_per_step);
            read_enum(n, "objective", o.objective, objective_from_string);
            read_enum(n, "allocation", o.allocation, allocation_from_string);
            n.read("zf_constraints", o.zf_constraints);
            n.read("active_gain", o.active_gain);
            n.read("optimize_gain", o.optimize_gain);
            n.read("warm_start", o.warm_start);
            n.read("final_zf", o.final_zf);
            n.finish();
        }

        std::optional<CombineMethod> combine_from_string(std::string_view s)
        {
            if (s == "average")
                return CombineMethod::average;
            if (s == "partition")
                return CombineMethod::partition;
            return std::nullopt;
        }

        std::optional<AssociationPolicy> policy_from_string(std::string_view s)
        {
            if (s == "single_best")
                return AssociationPolicy::single_best;
            if (s == "multi_threshold")
                return AssociationPolicy::multi_threshold;
            return std::nullopt;
        }

        // Re-raises a plain precondition failure as a schema error under `path`
        template <typename F>
        void check(const std::string &path, F &&f)
        {
            try
            {
                f();
            }
            catch (const ConfigError &)
            {
                throw;
            }
            catch (const InvalidArgument &e)
            {
                throw ConfigError(path + ": " + e.what());
            }
        }
    }

    void ScenarioConfig::validate() const
    {
        if (id.empty())
            throw ConfigError("id: must not be empty");
        if (trials < 1)
            throw ConfigError("trials: must be at least 1");
        check("geometry", [&] { geometry.validate(); });
        check("budgets", [&] { budgets.validate(); });
        check("power_model", [&] { power_model.validate(); });
        check("optimizer", [&] { optimizer.validate(); });
        if (!(bandwidth_hz >= 0.0))
            throw ConfigError("bandwidth_hz: must be non-negative");
        if (streams_per_ue < 1 || streams_per_ue > geometry.ue_antennas)
            throw ConfigError("geometry.streams_per_ue: must lie in [1, ue_antennas]");
        if (association_threshold < 0.0 || association_threshold > 1.0)
            throw ConfigError("association.threshold: must lie in [0, 1]");
        if (!(rate_min_bps.empty() || rate_min_bps.size() == 1 ||
              static_cast<int>(rate_min_bps.size()) == geometry.num_ues))
            throw ConfigError("rate_min_bps: expected one value or one per UE");
        for (double r : rate_min_bps)
            if (!(r >= 0.0))
                throw ConfigError("rate_min_bps: targets must be non-negative");

        const int k = geometry.num_ues;
        const int u = geometry.num_ris();
        const bool single_antenna = geometry.ue_antennas == 1;
        switch (preset)
        {
        case Preset::single_ris_single_ue:
            if (k != 1 || u != 1)
                throw ConfigError("geometry: single_ris_single_ue needs num_ues = 1 and one RIS");
            break;
        case Preset::single_ris_multi_ue:
            if (u != 1)
                throw ConfigError("geometry.ris: single_ris_multi_ue needs exactly one RIS");
            break;
        case Preset::massive:
            if (u != 1 || !single_antenna)
                throw ConfigError("geometry: massive needs one RIS and single-antenna UEs");
            break;
        case Preset::multi_ris:
        case Preset::ee_onoff:
        case Preset::scaling_sweep:
            if (!single_antenna)
                throw ConfigError("geometry.ue_antennas: this preset needs single-antenna UEs");
            break;
        case Preset::conceptual_cases:
        case Preset::rho_sweep:
            break;
        }

        if (preset == Preset::conceptual_cases)
        {
            const auto &p = conceptual;
            check("conceptual", [&]
                  {
                      conceptual::ReflectedPath(p.r1, p.d1_m, p.phi1_rad);
                      conceptual::ReflectedPath(p.r2, p.d2_m, p.phi2_rad);
                      require(p.c0 > 0.0 && p.pt_w > 0.0 && p.amplitude_budget > 0.0,
                              "c0, pt_w and amplitude_budget must be positive"); });
        }
        if (preset == Preset::rho_sweep)
        {
            const auto &p = rho_sweep;
            if (!(p.a >= 0.0 && p.b >= 0.0 && p.a + p.b > 0.0 && p.m > 0.0))
                throw ConfigError("rho_sweep: a, b must be non-negative and not both zero; m must be positive");
            if (p.points < 2)
                throw ConfigError("rho_sweep.points: must be at least 2");
        }
        if (preset == Preset::scaling_sweep)
        {
            const auto &p = scaling;
            if (!(p.distance_m > 0.0 && p.c0 > 0.0 && p.pt_w > 0.0 && p.ht_m > 0.0 && p.hr_m > 0.0 &&
                  p.wavelength_m > 0.0 && p.h1_gain > 0.0 && p.h2_gain > 0.0))
                throw ConfigError("scaling: all parameters must be positive");
            if (!sweep)
                throw ConfigError("sweep: scaling_sweep needs a sweep block");
        }

        if (sweep)
        {
            const auto allowed = sweep_variables(preset);
            if (std::find(allowed.begin(), allowed.end(), sweep->variable) == allowed.end())
                throw ConfigError("sweep.variable: '" + sweep->variable + "' is not supported by preset " +
                                  std::string(to_string(preset)));
            if (sweep->values.empty() && preset != Preset::rho_sweep)
                throw ConfigError("sweep.values: must not be empty");
            for (double v : sweep->values)
                if (!std::isfinite(v))
                    throw ConfigError("sweep.values: must be finite");
            const bool integral = sweep->variable == "bs_antennas" || sweep->variable == "ris_elements" ||
                                  sweep->variable == "num_ues";
            if (integral)
                for (double v : sweep->values)
                    if (v < 1.0 || v != std::floor(v))
                        throw ConfigError("sweep.values: " + sweep->variable + " takes positive integers");
            if (sweep->variable == "rho")
                for (double v : sweep->values)
                    if (v < 0.0 || v > 1.0)
                        throw ConfigError("sweep.values: rho must lie in [0, 1]");
        }
    }

    ScenarioConfig parse_config(std::string_view text)
    {
        json j;
        try
        {
            j = json::parse(text.begin(), text.end());
        }
        catch (const json::parse_error &e)
        {
            throw ConfigError(std::string("<root>: invalid JSON: ") + e.what());
        }

        Node root(j, "");
        std::string preset_name;
        root.read("preset", preset_name);
        if (preset_name.empty())
            throw ConfigError("preset: required");
        const auto preset = preset_from_string(preset_name);
        if (!preset)
            throw ConfigError("preset: unknown preset '" + preset_name + "'");

        ScenarioConfig c = default_config(*preset);
        root.read("id", c.id);
        root.read("seed", c.seed);
        root.read("trials", c.trials);
        root.read("bandwidth_hz", c.bandwidth_hz);
        root.read("rate_min_bps", c.rate_min_bps);
        root.read("timing", c.timing);

        if (auto n = root.child("geometry"))
            read_geometry(*n, c);
        if (auto n = root.child("noise"))
        {
            n->read("sigma2_w", c.geometry.sigma2);
            n->read("sigma_r2_w", c.geometry.sigma_r2);
            n->finish();
        }
        if (auto n = root.child("budgets"))
        {
            n->read("p_bs_max_w", c.budgets.p_bs_max);
            n->read("p_ris_max_w", c.budgets.p_ris_max);
            n->finish();
        }
        if (auto n = root.child("power_model"))
        {
            n->read("eta", c.power_model.eta);
            n->read("p_bs_circuit_w", c.power_model.p_bs_circuit);
            n->read("p_ris_element_w", c.power_model.p_ris_element);
            n->read("p_ue_circuit_w", c.power_model.p_ue_circuit);
            n->finish();
        }
        if (auto n = root.child("optimizer"))
            read_optimizer(*n, c.optimizer);
        if (auto n = root.child("massive"))
        {
            read_enum(*n, "combine", c.massive.combine, combine_from_string);
            n->read("active", c.massive.active);
            n->read("final_zf", c.massive.final_zf);
            n->finish();
        }
        if (auto n = root.child("association"))
        {
            read_enum(*n, "policy", c.association, policy_from_string);
            n->read("threshold", c.association_threshold);
            n->finish();
        }
        if (auto n = root.child("sweep"))
        {
            SweepSpec s;
            n->read("variable", s.variable);
            n->read("values", s.values);
            if (s.variable.empty())
                throw ConfigError("sweep.variable: required");
            n->finish();
            c.sweep = std::move(s);
        }
        if (auto n = root.child("conceptual"))
        {
            auto &p = c.conceptual;
            n->read("r1", p.r1);
            n->read("d1_m", p.d1_m);
            n->read("phi1_rad", p.phi1_rad);
            n->read("r2", p.r2);
            n->read("d2_m", p.d2_m);
            n->read("phi2_rad", p.phi2_rad);
            n->read("c0", p.c0);
            n->read("pt_w", p.pt_w);
            n->read("amplitude_budget", p.amplitude_budget);
            n->finish();
        }
        if (auto n = root.child("rho_sweep"))
        {
            auto &p = c.rho_sweep;
            n->read("a", p.a);
            n->read("b", p.b);
            n->read("m", p.m);
            n->read("points", p.points);
            n->finish();
        }
        if (auto n = root.child("scaling"))
        {
            auto &p = c.scaling;
            n->read("distance_m", p.distance_m);
            n->read("c0", p.c0);
            n->read("pt_w", p.pt_w);
            n->read("ht_m", p.ht_m);
            n->read("hr_m", p.hr_m);
            n->read("wavelength_m", p.wavelength_m);
            n->read("h1_gain", p.h1_gain);
            n->read("h2_gain", p.h2_gain);
            n->finish();
        }
        root.finish();

        c.optimizer.streams_per_ue = c.streams_per_ue;
        c.optimizer.power_model = c.power_model;
        c.validate();
        return c;
    }

    ScenarioConfig load_config(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in)
            throw InvalidArgument("cannot open config file " + path.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse_config(buf.str());
    }
}
