// SPDX-License-Identifier: Apache-2.0
//
// rismm - link-level simulation and optimization for RIS-assisted mmWave downlinks
// ------------------------------------------------------------------------

#include <rismm/scenario.hpp>

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char **argv)
{
    CLI::App app{"Link-level simulation of RIS-assisted mmWave downlinks"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string format = "csv";
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;

    auto *run = app.add_subcommand("run", "Run a scenario and write its result table");
    run->add_option("config", config_path, "Scenario config (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--out,-o", out_path, "Output file")->required();
    run->add_option("--format,-f", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    run->add_option("--seed", seed, "Override the base seed");
    run->add_option("--trials", trials, "Override the trial count")->check(CLI::PositiveNumber);

    auto *presets = app.add_subcommand("presets", "List the scenario presets");

    std::string validate_path;
    auto *validate = app.add_subcommand("validate", "Check a scenario config without running it");
    validate->add_option("config", validate_path, "Scenario config (JSON)")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (presets->parsed())
        {
            for (auto p : rismm::all_presets)
            {
                std::cout << rismm::to_string(p) << "\t" << rismm::preset_description(p) << "\t[";
                const auto vars = rismm::sweep_variables(p);
                for (std::size_t i = 0; i < vars.size(); ++i)
                    std::cout << (i ? " " : "") << vars[i];
                std::cout << "]\n";
            }
            return 0;
        }
        if (validate->parsed())
        {
            const auto cfg = rismm::load_config(validate_path);
            std::cout << "ok: " << cfg.id << " (" << rismm::to_string(cfg.preset) << ")\n";
            return 0;
        }

        auto cfg = rismm::load_config(config_path);
        if (seed)
            cfg.seed = *seed;
        if (trials)
            cfg.trials = *trials;
        cfg.validate();
        const auto table = rismm::run(cfg);
        rismm::emit(table, format == "json" ? rismm::OutputFormat::json : rismm::OutputFormat::csv, out_path);

        std::size_t failed = 0;
        for (const auto &row : table.rows)
            failed += row.status != "ok";
        std::cerr << table.rows.size() << " rows written to " << out_path;
        if (failed)
            std::cerr << " (" << failed << " not ok)";
        std::cerr << "\n";
        return 0;
    }
    catch (const std::exception &e)
    {
        std::cerr << "rismm: " << e.what() << "\n";
        return 1;
    }
}
