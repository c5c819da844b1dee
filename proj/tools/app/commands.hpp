#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace fearbif::app {

/// Exit codes of the command-line tool.
enum ExitCode : int { kOk = 0, kValidation = 2, kNumerical = 3, kRegression = 4 };

[[nodiscard]] const std::vector<std::string>& command_names();

/// Runs cfg.command, writing artifacts and a manifest under cfg.output_dir.
/// Progress goes to `log`. Throws ValidationError / NumericalError.
[[nodiscard]] int run_command(const RunConfig& cfg, std::ostream& log);

/// Default location of the shipped golden file.
[[nodiscard]] std::filesystem::path default_golden_path();

}  // namespace fearbif::app
