// SPDX-License-Identifier: Apache-2.0
//
// rismm - link-level simulation and optimization for RIS-assisted mmWave downlinks
// ------------------------------------------------------------------------

#ifndef RISMM_SCENARIO_HPP
#define RISMM_SCENARIO_HPP

#include <rismm/optimizer.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rismm
{
    enum class Preset
    {
        conceptual_cases,
        single_ris_single_ue,
        single_ris_multi_ue,
        massive,
        multi_ris,
        ee_onoff,
        rho_sweep,
        scaling_sweep,
    };

    inline constexpr std::array<Preset, 8> all_presets = {
        Preset::conceptual_cases, Preset::single_ris_single_ue, Preset::single_ris_multi_ue, Preset::massive,
        Preset::multi_ris,        Preset::ee_onoff,             Preset::rho_sweep,           Preset::scaling_sweep};

    std::string_view to_string(Preset p);
    std::optional<Preset> preset_from_string(std::string_view name);
    std::string_view preset_description(Preset p);

    // Schema violation; the message starts with the offending field path
    class ConfigError : public InvalidArgument
    {
    public:
        using InvalidArgument::InvalidArgument;
    };

    struct SweepSpec
    {
        std::string variable;
        std::vector<double> values;
    };

    // Two reflectors in front of a single-antenna link
    struct ConceptualParams
    {
        double r1 = 0.9;
        double d1_m = 100.0;
        double phi1_rad = 0.3;
        double r2 = 0.7;
        double d2_m = 120.0;
        double phi2_rad = 1.9;
        double c0 = 1.0;
        double pt_w = 1.0;
        double amplitude_budget = 2.0; // phase-only reflectors correspond to alpha = (1, 1)
    };

    struct RhoSweepParams
    {
        double a = 3.0;
        double b = 4.0;
        double m = 1.0;
        int points = 101;
    };

    struct ScalingParams
    {
        double distance_m = 1000.0;
        double c0 = 1.0;
        double pt_w = 1.0;
        double ht_m = 2.0;
        double hr_m = 1.0;
        double wavelength_m = 0.005;
        double h1_gain = 1.0;
        double h2_gain = 1.0;
    };

    struct ScenarioConfig
    {
        std::string id = "scenario";
        Preset preset = Preset::single_ris_single_ue;
        std::uint64_t seed = 1;
        int trials = 1;
        ScenarioGeometry geometry;
        int streams_per_ue = 1;
        PowerBudget budgets;
        PowerModelParams power_model;
        OptimizerConfig optimizer;
        MassiveOptions massive;
        AssociationPolicy association = AssociationPolicy::single_best;
        double association_threshold = 0.5;
        std::optional<SweepSpec> sweep;
        double bandwidth_hz = 0.0;
        std::vector<double> rate_min_bps;
        ConceptualParams conceptual;
        RhoSweepParams rho_sweep;
        ScalingParams scaling;
        bool timing = false; // add a wall_time_s column (breaks byte-identical output)

        void validate() const;
    };

    // Desk-scale defaults of a preset
    ScenarioConfig default_config(Preset preset);

    // JSON text; keys absent from the text keep the preset defaults, unknown keys are rejected
    ScenarioConfig parse_config(std::string_view text);
    ScenarioConfig load_config(const std::filesystem::path &path);

    // Sweep variables understood by a preset
    std::vector<std::string> sweep_variables(Preset preset);

    using MetricValue = std::optional<double>;

    struct RunResult
    {
        std::string scenario_id;
        std::uint64_t seed = 0;
        std::optional<double> sweep_value;
        int trial = 0;
        std::string status = "ok";
        int iterations = 0;
        std::vector<std::pair<std::string, MetricValue>> metrics; // ordered columns
        double wall_time_s = 0.0;
    };

    struct ResultTable
    {
        std::string sweep_variable; // empty without a sweep
        bool timing = false;
        std::vector<RunResult> rows;

        // Full column list: identifiers, fixed metrics, preset extras in first-appearance order
        std::vector<std::string> columns() const;
    };

    // One row per (sweep value, trial), seeds seed + trial, rows sorted by (sweep value, trial)
    ResultTable run(const ScenarioConfig &config);

    // Single trial of a preset for one sweep value
    RunResult run_trial(const ScenarioConfig &config, std::optional<double> sweep_value, int trial);

    enum class OutputFormat
    {
        csv,
        json,
    };

    std::string to_csv(const ResultTable &table);
    std::string to_json(const ResultTable &table);
    void emit(const ResultTable &table, OutputFormat format, const std::filesystem::path &path);

    // Inverse of to_csv
    ResultTable parse_csv(std::string_view text);
}

#endif
