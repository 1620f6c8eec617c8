// SPDX-License-Identifier: Apache-2.0
#include "shearlab/cli.hpp"
#include "shearlab/errors.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    using namespace shear;

    CLI::App app{"shearlab: enhanced dissipation rates of passive scalars in shear flows"};
    std::string command;
    std::optional<std::string> config_path;
    std::optional<std::string> out_flag;
    std::optional<int> workers;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> format;

    app.add_option("command", command, "subcommand to run")
        ->required()
        ->check(CLI::IsMember(command_names()));
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--out", out_flag, "output directory (beats " + std::string(kOutDirEnv) + " and the config)");
    app.add_option("--workers", workers, "OpenMP threads, 0 for all cores")->check(CLI::NonNegativeNumber);
    app.add_option("--seed", seed, "random seed");
    app.add_option("--format", format, "table format")->check(CLI::IsMember({"csv", "json", "gnuplot-data"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        const std::filesystem::path* none = nullptr;
        emit_diagnostic(make_diagnostic(command.empty() ? "shearlab" : command, ExitConfig, "usage", e.what()), none,
                        std::cerr);
        std::cerr << app.help();
        return ExitConfig;
    }

    RunConfig cfg;
    try {
        if (config_path) cfg = load_config(*config_path);
        if (workers) cfg.workers = *workers;
        if (seed) cfg.seed = *seed;
        if (format) cfg.format = *format;
    } catch (const Error& e) {
        const std::filesystem::path dir = resolve_output_dir(out_flag, RunConfig{});
        emit_diagnostic(make_diagnostic(command, ExitConfig, std::string(to_string(e.code())), e.what()), &dir,
                        std::cerr);
        return ExitConfig;
    }
    return run_command(command, cfg, resolve_output_dir(out_flag, cfg), std::cout, std::cerr);
}
