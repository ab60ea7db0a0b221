#include "borel/app.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App cli{"Borel-Laplace summation toolkit"};
    borel::RunConfig config;
    std::vector<std::string> sets;

    std::string commands;
    for (const auto& c : borel::run_commands()) commands += (commands.empty() ? "" : ", ") + c;
    cli.add_option("command", config.command, "one of: " + commands)
        ->required()
        ->check(CLI::IsMember(borel::run_commands()));
    cli.add_option("--problem", config.problem_path, "problem file")->required()->check(CLI::ExistingFile);
    cli.add_option("--out", config.output_dir, "output directory")->required();
    cli.add_option("--set", sets, "override key=value (repeatable)");
    cli.footer("Environment: BORELSUM_THREADS sets the worker count of grid kernels (default 1).\n"
               "Exit codes: 0 success, 1 invalid input, 2 numerical failure.");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = cli.exit(e);
        return rc == 0 ? 0 : 1;
    }

    for (const auto& s : sets) {
        auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) {
            std::cerr << "--set expects key=value, got: " << s << '\n';
            return 1;
        }
        config.overrides[s.substr(0, eq)] = s.substr(eq + 1);
    }

    auto result = borel::run(config);
    std::cout << result.summary;
    return result.exit_code;
}
