#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bebsim/commands.hpp"
#include "bebsim/errors.hpp"
#include "bebsim/scenario.hpp"
#include "bebsim/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"bebsim: battery-electric bus corridor simulator and fleet cost model"};
    app.set_version_flag("--version", bebsim::kVersion);
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool have_seed = false;
    std::vector<std::string> overrides;
    bool quiet = false;

    app.add_option("--config", config_path, "Scenario JSON file (defaults to the Lahore case study)");
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_option("--seed", seed, "Seed override")->each([&](const std::string&) { have_seed = true; });
    app.add_option("--set", overrides, "Override a scenario key (dotted.key=value, repeatable)");
    app.add_flag("--quiet", quiet, "Suppress progress output");

    CLI::App* simulate = app.add_subcommand("simulate", "Run one day of fleet operation");
    CLI::App* tco = app.add_subcommand("tco", "Diesel vs battery-electric cost of ownership");
    bool no_emissions = false;
    tco->add_flag("--no-emissions", no_emissions, "Exclude emission cost from the totals");
    CLI::App* sweep = app.add_subcommand("sweep", "Evaluate the fleet configuration grid");
    CLI::App* demand = app.add_subcommand("demand", "Generate one day of passenger demand");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1; // help/version exit cleanly; bad usage is a validation error
    }

    bebsim::CommandOptions opts;
    opts.out_dir = out_dir;
    opts.quiet = quiet;
    if (have_seed) opts.seed = seed;
    opts.include_emissions = !no_emissions;

    bebsim::Scenario scenario;
    try {
        scenario = bebsim::load_scenario(config_path, overrides);
    } catch (const bebsim::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    if (simulate->parsed()) return bebsim::cmd_simulate(scenario, opts);
    if (tco->parsed()) return bebsim::cmd_tco(scenario, opts);
    if (sweep->parsed()) return bebsim::cmd_sweep(scenario, opts);
    if (demand->parsed()) return bebsim::cmd_demand(scenario, opts);
    return 1;
}
