#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mviopt/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"mviopt: higher-order mirror-prox benchmark harness"};
    app.require_subcommand(1);

    std::string run_config;
    CLI::App* run_cmd = app.add_subcommand("run", "execute one experiment config");
    run_cmd->add_option("config", run_config, "JSON config path")->required();

    std::string sweep_config;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "execute a K-sweep config");
    sweep_cmd->add_option("config", sweep_config, "JSON config path")->required();

    std::string suite;
    CLI::App* verify_cmd = app.add_subcommand("verify", "run a property suite");
    verify_cmd->add_option("suite", suite, "suite name (or 'all')")->required();

    CLI::App* schema_cmd = app.add_subcommand("schema", "print the config schema");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : mviopt::kExitConfig;
    }

    if (run_cmd->parsed()) return mviopt::run_experiment(run_config);
    if (sweep_cmd->parsed()) return mviopt::run_sweep(sweep_config);
    if (verify_cmd->parsed()) return mviopt::run_verify(suite);
    if (schema_cmd->parsed()) {
        std::cout << mviopt::config_schema();
        return mviopt::kExitOk;
    }
    return mviopt::kExitConfig;
}
