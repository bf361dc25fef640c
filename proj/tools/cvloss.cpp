#include "commands.hpp"
#include "config.hpp"
#include "output.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace cli = cvloss::cli;

int main(int argc, char** argv) {
    CLI::App app{"Loss and photon subtraction in multimode Gaussian states"};
    app.require_subcommand(1);
    app.set_version_flag("--version", cli::k_artifact_version);

    std::string config_path;
    std::string out_dir;
    std::string xi_list;
    std::string order;
    for (const auto& name : cli::command_names()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory")->required();
        sub->add_option("--xi", xi_list, "comma-separated loss strengths, overrides the config");
        sub->add_option("--order", order, "subtract-first, lose-first or both, overrides the config");
    }
    auto* schema = app.add_subcommand("schema", "print the configuration schema");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::exit_config;
    }

    if (schema->parsed()) {
        std::cout << cli::config_schema_text();
        return cli::exit_ok;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    try {
        cli::RunConfig cfg = cli::load_config(config_path);
        if (!xi_list.empty()) {
            cfg.xi = cli::parse_xi_list(xi_list);
            cfg.source["xi"] = cfg.xi;
        }
        if (!order.empty()) {
            cfg.order = cli::parse_order(order);
            cfg.source["order"] = order;
        }
        return cli::run_command(command, cfg, out_dir);
    } catch (const cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return cli::exit_config;
    } catch (const cvloss::Error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return cli::exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return cli::exit_numerical;
    }
}
