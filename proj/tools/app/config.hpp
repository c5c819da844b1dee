#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>

#include <json.hpp>

#include "fearbif/diagnostics.hpp"
#include "fearbif/linear_stability.hpp"
#include "fearbif/model.hpp"
#include "fearbif/simulator.hpp"

namespace fearbif::app {

using nlohmann::json;

/// A parsed configuration document:
///
///   {
///     "command": "stability",            // optional when given on the command line
///     "params":  { "r0": 1.0, ... },      // overrides of the reference parameter set
///     "options": { "tau_max": 45 },       // subcommand options
///     "output_dir": "out"
///   }
struct RunConfig {
  std::string command;
  ModelParams params = ModelParams::reference();
  json options = json::object();
  std::filesystem::path output_dir = "out";
  json source = json::object();  ///< the document as given, recorded in the manifest
};

/// Validates structure and types; unknown keys are rejected.
[[nodiscard]] RunConfig parse_config(const json& doc);
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);

/// Typed access to "options" with validation errors naming the key.
class Options {
 public:
  explicit Options(const json& j) : j_(j) {}

  [[nodiscard]] double number(const char* key, double fallback) const;
  [[nodiscard]] int integer(const char* key, int fallback) const;
  [[nodiscard]] bool boolean(const char* key, bool fallback) const;
  [[nodiscard]] std::string string(const char* key, const std::string& fallback) const;
  [[nodiscard]] std::pair<double, double> range(const char* key, std::pair<double, double> fallback) const;
  [[nodiscard]] std::pair<int, int> int_range(const char* key, std::pair<int, int> fallback) const;
  [[nodiscard]] std::optional<std::pair<double, double>> optional_pair(const char* key) const;
  [[nodiscard]] bool has(const char* key) const { return j_.contains(key); }
  [[nodiscard]] Branch branch(const char* key, Branch fallback) const;

  /// "grid": {"M", "dt", "T", "scheme"}, "record_stride", "max_snapshots".
  [[nodiscard]] SimulationOptions simulation() const;
  /// "history": {"u": expr, "v": expr} with the given defaults.
  [[nodiscard]] std::pair<HistoryFn, HistoryFn> history(const std::string& u_default,
                                                        const std::string& v_default) const;
  /// "seeds", "seed", "discard_fraction", "divergence".
  [[nodiscard]] ClassifyOptions classify() const;

 private:
  [[nodiscard]] const json* find(const char* key) const;
  const json& j_;
};

}  // namespace fearbif::app
