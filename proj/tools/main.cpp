#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "app/commands.hpp"
#include "app/config.hpp"
#include "fearbif/error.hpp"

namespace {

using fearbif::app::ExitCode;
using fearbif::app::RunConfig;

int report_error(const char* kind, const std::string& message, int code) {
  const nlohmann::json record{{"error", true}, {"kind", kind}, {"message", message}};
  std::cerr << record.dump() << '\n';
  return code;
}

RunConfig resolve(const std::string& command, const std::optional<std::string>& config_path,
                  const std::optional<std::string>& out_dir) {
  RunConfig cfg;
  if (config_path) cfg = fearbif::app::load_config(*config_path);
  if (!command.empty()) {
    if (!cfg.command.empty() && cfg.command != command) {
      throw fearbif::ValidationError("configuration names command '" + cfg.command + "' but '" + command +
                                     "' was requested");
    }
    cfg.command = command;
  }
  if (cfg.command.empty()) throw fearbif::ValidationError("no command given");
  if (out_dir) cfg.output_dir = *out_dir;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bifurcation analysis and simulation of a delayed diffusive predator-prey model with fear effect"};
  app.require_subcommand(1);

  std::optional<std::string> config_path;
  std::optional<std::string> out_dir;
  std::string run_file;
  int figure = 0;
  std::string golden;

  auto* run = app.add_subcommand("run", "Run the command named inside a configuration file");
  run->add_option("config", run_file, "Configuration file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (overrides output_dir)");

  for (const std::string& name : fearbif::app::command_names()) {
    auto* sub = app.add_subcommand(name, "Run '" + name + "'");
    sub->add_option("--config", config_path, "Configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory");
    if (name == "reproduce-figure") sub->add_option("figure", figure, "Figure number (1-8)")->required();
    if (name == "regression") sub->add_option("--golden", golden, "Golden-value file");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ExitCode::kValidation;
  }

  try {
    RunConfig cfg;
    if (run->parsed()) {
      cfg = resolve("", run_file, out_dir);
    } else {
      const std::string command = app.get_subcommands().front()->get_name();
      cfg = resolve(command, config_path, out_dir);
      if (command == "reproduce-figure") cfg.options["figure"] = figure;
      if (!golden.empty()) cfg.options["golden"] = golden;
    }
    return fearbif::app::run_command(cfg, std::cout);
  } catch (const fearbif::ValidationError& e) {
    return report_error("validation", e.what(), ExitCode::kValidation);
  } catch (const fearbif::NumericalError& e) {
    return report_error("numerical", e.what(), ExitCode::kNumerical);
  } catch (const std::exception& e) {
    return report_error("internal", e.what(), ExitCode::kNumerical);
  }
}
