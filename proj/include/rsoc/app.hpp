#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "rsoc/config.hpp"

namespace rsoc {

/// Exit codes of the command line tool.
enum ExitCode : int { kOk = 0, kValidation = 1, kSolver = 2, kVerificationFail = 3 };

/// Loads the config, applies the seed override, runs the command and writes
/// its artifacts into `out_dir` (summary.json, manifest.json, config.ini and
/// the command's CSV files). Errors are written to error.json and mapped onto
/// the exit codes.
int run_cli(Command command, const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
            std::optional<std::uint64_t> seed, std::ostream& log);

/// Same, from an already parsed config.
int run(Command command, RunConfig cfg, const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace rsoc
