#include "fearbif/field_io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <ostream>

#include "fearbif/error.hpp"

namespace fearbif {

static_assert(std::endian::native == std::endian::little, "binary field layout assumes a little-endian host");

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return {buf, res.ptr};
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_field_csv(std::ostream& out, const Field& field) {
  out << "t,x,u,v\n";
  for (std::size_t i = 0; i < field.snapshot_t.size(); ++i) {
    const std::string t = format_double(field.snapshot_t[i]);
    for (std::size_t j = 0; j < field.x.size(); ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      out << t << ',' << format_double(field.x[j]) << ',' << format_double(field.snapshot_u[i](jj)) << ','
          << format_double(field.snapshot_v[i](jj)) << '\n';
    }
  }
}

namespace {

void put_u64(std::string& s, std::uint64_t v) {
  char b[8];
  std::memcpy(b, &v, 8);
  s.append(b, 8);
}

void put_f64(std::string& s, double v) {
  char b[8];
  std::memcpy(b, &v, 8);
  s.append(b, 8);
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}
  template <class T>
  T get() {
    if (pos_ + sizeof(T) > bytes_.size()) throw ValidationError("truncated FBF1 data");
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  [[nodiscard]] std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_field_binary(const Field& field) {
  const std::size_t M = field.x.size();
  const std::size_t N = field.snapshot_t.size();
  std::string s;
  s.reserve(4 + 16 + 8 * (N + M + 2 * N * M));
  s.append("FBF1", 4);
  put_u64(s, M);
  put_u64(s, N);
  for (double t : field.snapshot_t) put_f64(s, t);
  for (double x : field.x) put_f64(s, x);
  for (const auto& u : field.snapshot_u) {
    for (Eigen::Index j = 0; j < u.size(); ++j) put_f64(s, u(j));
  }
  for (const auto& v : field.snapshot_v) {
    for (Eigen::Index j = 0; j < v.size(); ++j) put_f64(s, v(j));
  }
  return s;
}

DecodedField decode_field_binary(std::string_view bytes) {
  if (bytes.size() < 20 || bytes.substr(0, 4) != "FBF1") throw ValidationError("not an FBF1 field");
  Reader r(bytes.substr(4));
  const auto M = r.get<std::uint64_t>();
  const auto N = r.get<std::uint64_t>();
  if (r.remaining() != 8 * (N + M + 2 * N * M)) throw ValidationError("FBF1 size does not match its header");
  DecodedField d;
  d.t.resize(N);
  d.x.resize(M);
  for (auto& t : d.t) t = r.get<double>();
  for (auto& x : d.x) x = r.get<double>();
  d.u.assign(N, std::vector<double>(M));
  d.v.assign(N, std::vector<double>(M));
  for (auto& row : d.u) {
    for (auto& val : row) val = r.get<double>();
  }
  for (auto& row : d.v) {
    for (auto& val : row) val = r.get<double>();
  }
  return d;
}

void write_timeseries_csv(std::ostream& out, const Field& field) {
  out << "t,u0,v0\n";
  for (std::size_t i = 0; i < field.t.size(); ++i) {
    out << format_double(field.t[i]) << ',' << format_double(field.u_left[i]) << ','
        << format_double(field.v_left[i]) << '\n';
  }
}

}  // namespace fearbif
