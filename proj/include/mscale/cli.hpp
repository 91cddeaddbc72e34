#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mscale/config.hpp"

namespace mscale {

// Subcommands of the batch front-end.
const std::vector<std::string>& subcommands();

// Declared keys and defaults of one subcommand. Throws ConfigError on an
// unknown subcommand.
Config default_config(const std::string& subcommand);

// Runs a fully resolved configuration, writing the CSV (header included) to
// out. Throws ConfigError for invalid parameter combinations.
void run_subcommand(const std::string& subcommand, const Config& cfg, std::ostream& out, std::ostream& log);

// Entry point: parses argv, resolves defaults < file < flags, applies the
// worker count (run.workers, else MSCALE_WORKERS), and returns the exit code.
int cli_main(int argc, char** argv);

}  // namespace mscale
