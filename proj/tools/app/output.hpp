#pragma once

#include <complex>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

#include "config.hpp"

namespace fearbif::app {

/// Comma-separated text with a header row and LF line endings. Doubles are
/// written in their shortest round-trip form.
class Csv {
 public:
  explicit Csv(std::initializer_list<std::string> header);
  Csv& cell(double v);
  Csv& cell(long v);
  Csv& cell(int v) { return cell(static_cast<long>(v)); }
  Csv& cell(const std::string& v);
  void end_row();
  [[nodiscard]] const std::string& str() const { return text_; }

 private:
  std::string text_;
  bool fresh_ = true;
};

[[nodiscard]] json to_json(std::complex<double> z);
[[nodiscard]] json to_json(const ModelParams& p);

/// Collects the artifacts of one command under a directory, writing each
/// atomically, and records them in manifest.json.
class ArtifactWriter {
 public:
  ArtifactWriter(std::filesystem::path dir, const RunConfig& cfg);

  void text(const std::string& name, const std::string& content);
  void write_json(const std::string& name, const json& content);
  void csv(const std::string& name, const Csv& table) { text(name, table.str()); }
  /// Writes manifest.json; call once after all artifacts.
  void finish(const json& extra = json::object());

  [[nodiscard]] const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  const RunConfig& cfg_;
  std::vector<std::string> artifacts_;
};

}  // namespace fearbif::app
