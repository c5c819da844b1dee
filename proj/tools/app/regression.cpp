#include "regression.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fearbif/error.hpp"
#include "fearbif/hopf.hpp"
#include "fearbif/hopf_hopf.hpp"
#include "fearbif/linear_stability.hpp"

namespace fearbif::app {

using nlohmann::json;

std::vector<GoldenItem> load_golden(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("golden file not found: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ValidationError("golden file is not valid JSON: " + std::string(e.what()));
  }
  if (!doc.is_object() || !doc.contains("items") || !doc["items"].is_array()) {
    throw ValidationError("golden file must contain an 'items' array");
  }
  std::vector<GoldenItem> items;
  for (const json& j : doc["items"]) {
    if (!j.is_object() || !j.contains("id") || !j.contains("value") || !j.contains("tolerance") ||
        !j["id"].is_string() || !j["value"].is_number() || !j["tolerance"].is_number()) {
      throw ValidationError("golden item needs string 'id' and numeric 'value', 'tolerance'");
    }
    GoldenItem g;
    g.id = j["id"].get<std::string>();
    g.expected = j["value"].get<double>();
    g.tolerance = j["tolerance"].get<double>();
    const std::string mode = j.value("mode", std::string("abs"));
    if (mode != "abs" && mode != "rel") throw ValidationError("golden item '" + g.id + "': mode must be abs or rel");
    g.relative = mode == "rel";
    items.push_back(g);
  }
  return items;
}

std::map<std::string, double> compute_reference_values() {
  std::map<std::string, double> out;
  const ModelParams base = ModelParams::reference(0.12);

  const Equilibrium eq = *positive_equilibrium(base);
  out["equilibrium.u_star"] = eq.u_star;
  out["equilibrium.v_star"] = eq.v_star;

  const HopfReport hr = hopf_report(base, 0, 0, Branch::plus);
  out["hopf.tau_bar"] = hr.point.tau;
  out["hopf.omega"] = hr.point.omega;
  out["hopf.re_c1"] = hr.classification.c1_0.real();
  out["hopf.im_c1"] = hr.classification.c1_0.imag();
  out["hopf.beta2"] = hr.classification.beta2;
  out["hopf.mu2_positive"] = hr.classification.mu2 > 0.0 ? 1.0 : 0.0;

  const StabilityWindows w = stability_windows(ModelParams::reference(1.0), 45.0);
  for (std::size_t i = 0; i < w.windows.size(); ++i) {
    out["stability.r0_1.w" + std::to_string(i) + ".start"] = w.windows[i].start;
    out["stability.r0_1.w" + std::to_string(i) + ".end"] = w.windows[i].end;
  }
  out["stability.r0_1.count"] = static_cast<double>(w.windows.size());
  const StabilityWindows w012 = stability_windows(base, 20.0);
  if (!w012.windows.empty()) out["stability.r0_012.w0.end"] = w012.windows.front().end;

  if (const auto ex = hopf_existence_interval(base, 0, Branch::plus, {0.1, 10.0}, 200)) {
    out["existence.k0.lower"] = ex->first;
    out["existence.k0.upper"] = ex->second;
  }

  const HopfCurve plus = hopf_curve(base, 0, 1, Branch::plus, {0.12, 0.3}, 50);
  const HopfCurve minus = hopf_curve(base, 0, 0, Branch::minus, {0.12, 0.3}, 50);
  const HopfHopfPoint hh = find_hopf_hopf(plus, minus);
  out["hh.r0_star"] = hh.r0_star;
  out["hh.tau_star"] = hh.tau_star;
  out["hh.omega_plus"] = hh.omega_plus;
  out["hh.omega_minus"] = hh.omega_minus;

  // Normal-form coefficients at the four-decimal Hopf-Hopf point.
  const ModelParams at = base.with_r0(0.1606);
  const ModeData md = mode_data(at, 0);
  const HHEigendata eig = hh_eigendata(at, 42.5794, *md.omega_plus, *md.omega_minus);
  const HHCoefficients c = hh_coefficients(at, eig);
  const std::pair<const char*, std::complex<double>> coeffs[] = {
      {"B11", c.B11},           {"B21", c.B21},           {"B13", c.B13},           {"B23", c.B23},
      {"B2100", c.g2100.total}, {"B1011", c.g1011.total}, {"B0021", c.g0021.total}, {"B1110", c.g1110.total}};
  for (const auto& [name, z] : coeffs) {
    out[std::string("hh.") + name + ".re"] = z.real();
    out[std::string("hh.") + name + ".im"] = z.imag();
  }
  const Unfolding u = unfolding(c);
  out["unfolding.eps1"] = u.eps1;
  out["unfolding.eps2"] = u.eps2;
  out["unfolding.d0"] = u.d0;
  out["unfolding.b0"] = u.b0;
  out["unfolding.c0"] = u.c0;
  out["unfolding.det"] = u.det;
  out["unfolding.case_VIa"] = u.case_label == "VIa" ? 1.0 : 0.0;

  const BifurcationSet set = bifurcation_lines(u, true);
  for (const BifurcationLine& l : set.lines) out["slope." + l.name] = l.slope;
  if (set.l4) out["slope.l4"] = set.l4->slope;

  const BautinPoint b = find_bautin(base, 0, 0, Branch::minus, {0.1607, 1.0}, 32);
  out["bautin.r0"] = b.r0;
  out["bautin.tau"] = b.tau;
  return out;
}

std::vector<RegressionEntry> compare(const std::vector<GoldenItem>& golden, const std::map<std::string, double>& actual) {
  std::vector<RegressionEntry> out;
  for (const GoldenItem& g : golden) {
    RegressionEntry e;
    e.item = g;
    if (const auto it = actual.find(g.id); it != actual.end()) {
      e.actual = it->second;
      const double allowed = g.relative ? g.tolerance * std::abs(g.expected) : g.tolerance;
      e.pass = std::abs(it->second - g.expected) <= allowed;
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace fearbif::app
