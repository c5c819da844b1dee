#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fearbif::app {

struct GoldenItem {
  std::string id;
  double expected = 0.0;
  double tolerance = 0.0;
  bool relative = false;  ///< tolerance relative to |expected| rather than absolute
};

struct RegressionEntry {
  GoldenItem item;
  std::optional<double> actual;
  bool pass = false;
};

/// Reads {"items": [{"id", "value", "tolerance", "mode": "abs"|"rel"}]}.
/// A missing or malformed file is a ValidationError.
[[nodiscard]] std::vector<GoldenItem> load_golden(const std::filesystem::path& path);

/// Every quantity the golden file can name, computed from scratch with the
/// reference parameter set.
[[nodiscard]] std::map<std::string, double> compute_reference_values();

[[nodiscard]] std::vector<RegressionEntry> compare(const std::vector<GoldenItem>& golden,
                                                   const std::map<std::string, double>& actual);

}  // namespace fearbif::app
