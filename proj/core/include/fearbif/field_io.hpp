#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "fearbif/simulator.hpp"

namespace fearbif {

/// Shortest decimal string that parses back to exactly the same double.
[[nodiscard]] std::string format_double(double value);

/// Writes the content to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Long-format CSV of the stored snapshots, header "t,x,u,v".
void write_field_csv(std::ostream& out, const Field& field);

/// Binary snapshot dump. Layout, all little-endian:
///   bytes 0..3   magic "FBF1"
///   uint64       M (nodes)
///   uint64       N_t (snapshots)
///   f64[N_t]     times
///   f64[M]       node coordinates
///   f64[N_t][M]  u, row per snapshot
///   f64[N_t][M]  v, row per snapshot
[[nodiscard]] std::string encode_field_binary(const Field& field);

struct DecodedField {
  std::vector<double> t;
  std::vector<double> x;
  std::vector<std::vector<double>> u;
  std::vector<std::vector<double>> v;
};
[[nodiscard]] DecodedField decode_field_binary(std::string_view bytes);

/// CSV of the boundary series, header "t,u0,v0".
void write_timeseries_csv(std::ostream& out, const Field& field);

}  // namespace fearbif
