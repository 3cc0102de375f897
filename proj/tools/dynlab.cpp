// dynlab: simulate and verify stochastic Heavy Ball dynamics.
//
//   dynlab <validate|simulate|ensemble|rates|equivalence>
//          --config <path> [--out <dir>] [--seed-offset <n>]
//
// Exit codes: 0 all verdicts pass, 1 verdict failed, 2 config error,
// 3 execution error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "dynlab/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"stochastic Heavy Ball dynamics laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed_offset = 0;

    for (const char* name :
         {"validate", "simulate", "ensemble", "rates", "equivalence"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "experiment config (JSON)")
            ->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed-offset", seed_offset, "added to seeds.base");
    }

    CLI11_PARSE(app, argc, argv);

    const auto command = dynlab::command_from_string(app.get_subcommands().front()->get_name());

    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "cannot open config: " << config_path << "\n";
        return 2;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();

    const dynlab::ParseResult parsed = dynlab::parse_config(buffer.str());
    if (!parsed.ok()) {
        for (const auto& issue : parsed.errors)
            std::cerr << "config error at " << issue.path << ": " << issue.message
                      << "\n";
        return 2;
    }

    std::filesystem::path out("out");
    if (!parsed.config->output_directory.empty()) out = parsed.config->output_directory;
    if (!out_dir.empty()) out = out_dir;

    const dynlab::RunOutcome outcome =
        dynlab::run_experiment(*parsed.config, *command, out, seed_offset);
    for (const auto& msg : outcome.messages) std::cerr << msg << "\n";
    return outcome.exit_code;
}
