#pragma once

#include <filesystem>

#include "dynlab/config.hpp"

namespace dynlab {

// CLI commands over one experiment config. Exit codes: 0 all verdicts pass,
// 1 a verdict failed, 2 config/schema error, 3 execution error (divergence,
// ensemble failure); on execution errors partial artifacts stay on disk next
// to a `<command>.failed` marker.
enum class Command { validate, simulate, ensemble, rates, equivalence };

std::optional<Command> command_from_string(const std::string& name);

struct RunOutcome {
    int exit_code = 0;
    std::vector<std::string> messages;
};

RunOutcome run_experiment(const ExperimentConfig& config, Command command,
                          const std::filesystem::path& out_dir,
                          std::uint64_t seed_offset = 0);

} // namespace dynlab
