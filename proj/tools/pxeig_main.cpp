#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "pxeig/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Variable-exponent Rayleigh quotient solver and limit diagnostics"};
    app.require_subcommand(1, 1);

    std::string config;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config, "config JSON")->required();
    app.add_option("--out", out, "output directory");
    app.add_option("--seed", seed, "RNG seed (overrides the config)");
    // options may come before or after the subcommand
    app.fallthrough();
    for (const std::string& name : pxeig::subcommands()) app.add_subcommand(name);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return pxeig::kExitConfig;
    }
    return pxeig::run_command(app.get_subcommands().front()->get_name(), config, out, seed, std::cout, std::cerr);
}
