#include "output.hpp"

#include <boost/version.hpp>
#include <Eigen/Core>

#include "fearbif/field_io.hpp"

#ifndef FEARBIF_VERSION
#define FEARBIF_VERSION "unknown"
#endif

namespace fearbif::app {

Csv::Csv(std::initializer_list<std::string> header) {
  for (const auto& h : header) cell(h);
  end_row();
}

Csv& Csv::cell(double v) { return cell(format_double(v)); }

Csv& Csv::cell(long v) { return cell(std::to_string(v)); }

Csv& Csv::cell(const std::string& v) {
  if (!fresh_) text_ += ',';
  text_ += v;
  fresh_ = false;
  return *this;
}

void Csv::end_row() {
  text_ += '\n';
  fresh_ = true;
}

json to_json(std::complex<double> z) { return {{"re", z.real()}, {"im", z.imag()}}; }

json to_json(const ModelParams& p) {
  return {{"r0", p.r0}, {"r2", p.r2}, {"K", p.K},   {"d", p.d},   {"a", p.a},   {"p", p.p},
          {"c", p.c},   {"m", p.m},   {"d1", p.d1}, {"d2", p.d2}, {"l", p.l},   {"tau", p.tau}};
}

ArtifactWriter::ArtifactWriter(std::filesystem::path dir, const RunConfig& cfg) : dir_(std::move(dir)), cfg_(cfg) {}

void ArtifactWriter::text(const std::string& name, const std::string& content) {
  write_file_atomic(dir_ / name, content);
  artifacts_.push_back(name);
}

void ArtifactWriter::write_json(const std::string& name, const json& content) {
  text(name, content.dump(2) + "\n");
}

void ArtifactWriter::finish(const json& extra) {
  json m;
  m["tool"] = "fearbif";
  m["version"] = FEARBIF_VERSION;
  m["command"] = cfg_.command;
  m["config"] = cfg_.source;
  m["output_dir"] = cfg_.output_dir.generic_string();
  m["options"] = cfg_.options;
  m["params"] = to_json(cfg_.params);
  m["artifacts"] = artifacts_;
  m["libraries"] = {
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                    std::to_string(EIGEN_MINOR_VERSION)},
      {"boost", BOOST_LIB_VERSION},
      {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                            std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                            std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
  for (const auto& [k, v] : extra.items()) m[k] = v;
  write_file_atomic(dir_ / "manifest.json", m.dump(2) + "\n");
}

}  // namespace fearbif::app
