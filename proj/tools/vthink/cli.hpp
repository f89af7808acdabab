#pragma once

#include <string>
#include <vector>

#include "vthink/commands.hpp"
#include "vthink/config.hpp"

namespace CLI {
class App;
}

namespace vthink::cli {

/// Registers every run-configuration flag on `app`, writing into `layer`.
/// Flag names are the config keys with '_' spelled '-'.
void add_config_flags(CLI::App& app, ConfigLayer& layer);

/// Parses and executes a command line. Returns the process exit code; errors
/// are reported on `err`.
int run_cli(const std::vector<std::string>& args, const CommandContext& ctx, std::ostream& err);

}  // namespace vthink::cli
