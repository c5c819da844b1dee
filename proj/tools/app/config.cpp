#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "expression.hpp"
#include "fearbif/error.hpp"

namespace fearbif::app {

namespace {

double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ValidationError(where + " must be a number");
  return v.get<double>();
}

void apply_params(ModelParams& p, const json& j) {
  if (!j.is_object()) throw ValidationError("'params' must be an object");
  const std::pair<const char*, double ModelParams::*> fields[] = {
      {"r0", &ModelParams::r0}, {"r2", &ModelParams::r2}, {"K", &ModelParams::K},   {"d", &ModelParams::d},
      {"a", &ModelParams::a},   {"p", &ModelParams::p},   {"c", &ModelParams::c},   {"m", &ModelParams::m},
      {"d1", &ModelParams::d1}, {"d2", &ModelParams::d2}, {"l", &ModelParams::l},   {"tau", &ModelParams::tau}};
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const auto& [name, member] : fields) {
      if (key == name) {
        p.*member = as_number(value, "params." + key);
        known = true;
      }
    }
    if (!known) throw ValidationError("unknown parameter '" + key + "'");
  }
  p.validate();
}

}  // namespace

RunConfig parse_config(const json& doc) {
  if (!doc.is_object() || doc.empty()) throw ValidationError("configuration must be a non-empty JSON object");
  static const std::set<std::string> allowed{"command", "params", "options", "output_dir"};
  for (const auto& [key, _] : doc.items()) {
    if (!allowed.count(key)) throw ValidationError("unknown configuration key '" + key + "'");
  }
  RunConfig cfg;
  cfg.source = doc;
  if (doc.contains("command")) {
    if (!doc["command"].is_string()) throw ValidationError("'command' must be a string");
    cfg.command = doc["command"].get<std::string>();
  }
  if (doc.contains("params")) apply_params(cfg.params, doc["params"]);
  if (doc.contains("options")) {
    if (!doc["options"].is_object()) throw ValidationError("'options' must be an object");
    cfg.options = doc["options"];
  }
  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string()) throw ValidationError("'output_dir' must be a string");
    cfg.output_dir = doc["output_dir"].get<std::string>();
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read configuration file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ValidationError("configuration file " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

const json* Options::find(const char* key) const {
  const auto it = j_.find(key);
  return it == j_.end() ? nullptr : &*it;
}

double Options::number(const char* key, double fallback) const {
  const json* v = find(key);
  return v ? as_number(*v, std::string("options.") + key) : fallback;
}

int Options::integer(const char* key, int fallback) const {
  const json* v = find(key);
  if (!v) return fallback;
  if (!v->is_number_integer()) throw ValidationError(std::string("options.") + key + " must be an integer");
  return v->get<int>();
}

bool Options::boolean(const char* key, bool fallback) const {
  const json* v = find(key);
  if (!v) return fallback;
  if (!v->is_boolean()) throw ValidationError(std::string("options.") + key + " must be true or false");
  return v->get<bool>();
}

std::string Options::string(const char* key, const std::string& fallback) const {
  const json* v = find(key);
  if (!v) return fallback;
  if (!v->is_string()) throw ValidationError(std::string("options.") + key + " must be a string");
  return v->get<std::string>();
}

std::pair<double, double> Options::range(const char* key, std::pair<double, double> fallback) const {
  const auto r = optional_pair(key);
  if (!r) return fallback;
  if (!(r->first < r->second)) throw ValidationError(std::string("options.") + key + " must be increasing");
  return *r;
}

std::optional<std::pair<double, double>> Options::optional_pair(const char* key) const {
  const json* v = find(key);
  if (!v) return std::nullopt;
  if (!v->is_array() || v->size() != 2) throw ValidationError(std::string("options.") + key + " must be [a, b]");
  return std::make_pair(as_number((*v)[0], key), as_number((*v)[1], key));
}

std::pair<int, int> Options::int_range(const char* key, std::pair<int, int> fallback) const {
  const json* v = find(key);
  if (!v) return fallback;
  if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number_integer() || !(*v)[1].is_number_integer()) {
    throw ValidationError(std::string("options.") + key + " must be [lo, hi] integers");
  }
  const int lo = (*v)[0].get<int>();
  const int hi = (*v)[1].get<int>();
  if (lo < 0 || hi < lo) throw ValidationError(std::string("options.") + key + " must satisfy 0 <= lo <= hi");
  return {lo, hi};
}

Branch Options::branch(const char* key, Branch fallback) const {
  const json* v = find(key);
  if (!v) return fallback;
  const std::string s = v->is_string() ? v->get<std::string>() : "";
  if (s == "plus" || s == "+") return Branch::plus;
  if (s == "minus" || s == "-") return Branch::minus;
  throw ValidationError(std::string("options.") + key + " must be \"plus\" or \"minus\"");
}

SimulationOptions Options::simulation() const {
  SimulationOptions s;
  if (const json* g = find("grid")) {
    if (!g->is_object()) throw ValidationError("options.grid must be an object");
    const Options grid(*g);
    s.grid.M = grid.integer("M", s.grid.M);
    s.grid.dt = grid.number("dt", 0.0);
    s.grid.T = grid.number("T", 0.0);
    s.grid.scheme = parse_scheme(grid.string("scheme", "imex2"));
  }
  s.record_stride = integer("record_stride", s.record_stride);
  s.max_snapshots = integer("max_snapshots", s.max_snapshots);
  if (s.record_stride < 1) throw ValidationError("options.record_stride must be >= 1");
  if (s.max_snapshots < 0) throw ValidationError("options.max_snapshots must be >= 0");
  return s;
}

std::pair<HistoryFn, HistoryFn> Options::history(const std::string& u_default, const std::string& v_default) const {
  std::string u = u_default;
  std::string v = v_default;
  if (const json* h = find("history")) {
    if (!h->is_object()) throw ValidationError("options.history must be an object");
    const Options hist(*h);
    u = hist.string("u", u);
    v = hist.string("v", v);
  }
  return {parse_history(u), parse_history(v)};
}

ClassifyOptions Options::classify() const {
  ClassifyOptions c;
  c.seeds = integer("seeds", c.seeds);
  c.seed = static_cast<std::uint64_t>(integer("seed", static_cast<int>(c.seed)));
  c.discard_fraction = number("discard_fraction", c.discard_fraction);
  c.divergence = boolean("divergence", c.divergence);
  if (c.seeds < 1) throw ValidationError("options.seeds must be >= 1");
  if (!(c.discard_fraction >= 0.0 && c.discard_fraction < 1.0)) {
    throw ValidationError("options.discard_fraction must lie in [0, 1)");
  }
  return c;
}

}  // namespace fearbif::app
