#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "fearbif/diagnostics.hpp"
#include "fearbif/error.hpp"
#include "fearbif/field_io.hpp"
#include "fearbif/hopf.hpp"
#include "fearbif/hopf_hopf.hpp"
#include "fearbif/linear_stability.hpp"
#include "output.hpp"
#include "regression.hpp"

#ifndef FEARBIF_GOLDEN_DEFAULT
#define FEARBIF_GOLDEN_DEFAULT "tools/golden/reference_values.json"
#endif

namespace fearbif::app {

namespace {

constexpr const char* kFig1U = "1.25+0.001*cos(x)";
constexpr const char* kFig1V = "0.002+0.001*cos(x)";
constexpr const char* kRegimeU = "1.25+0.02*cos(x)";
constexpr const char* kRegimeV = "0.1+0.02*cos(x)";
constexpr const char* kHighU = "6+0.02*cos(x)";
constexpr const char* kHighV = "3+0.02*cos(x)";

// ---------------------------------------------------------------------------
// Shared pieces

struct HHContext {
  HopfHopfPoint point;
  ModelParams at;  ///< parameters with r0 = r0*
  HHEigendata eig;
  HHCoefficients coeffs;
  Unfolding unf;
  bool located = false;  ///< false when the point was given explicitly
};

HHContext hh_context(const RunConfig& cfg) {
  const Options o(cfg.options);
  HHContext ctx;
  const auto [kp, jp] = o.int_range("plus_curve", {0, 1});
  const auto [km, jm] = o.int_range("minus_curve", {0, 0});
  if (const auto given = o.optional_pair("hh_point")) {
    ctx.at = cfg.params.with_r0(given->first);
    const ModeData mp = mode_data(ctx.at, kp);
    const ModeData mm = mode_data(ctx.at, km);
    if (!mp.omega_plus || !mm.omega_minus) throw ValidationError("hh_point: both branches must exist at r0");
    ctx.point = {given->first, given->second, kp, jp, km, jm, *mp.omega_plus, *mm.omega_minus, 0.0, 0.0, false};
    ctx.eig = hh_eigendata(ctx.at, given->second, *mp.omega_plus, *mm.omega_minus, kp, km);
  } else {
    const auto range = o.range("r0_range", {0.12, 0.3});
    const int n = o.integer("samples", 50);
    const HopfCurve plus = hopf_curve(cfg.params, kp, jp, Branch::plus, range, n);
    const HopfCurve minus = hopf_curve(cfg.params, km, jm, Branch::minus, range, n);
    ctx.point = find_hopf_hopf(plus, minus);
    ctx.at = cfg.params.with_r0(ctx.point.r0_star);
    ctx.eig = hh_eigendata(cfg.params, ctx.point);
    ctx.located = true;
  }
  ctx.coeffs = hh_coefficients(ctx.at, ctx.eig);
  ctx.unf = unfolding(ctx.coeffs);
  return ctx;
}

json cubic_json(const CubicTerm& t) {
  return {{"C", to_json(t.C)}, {"D", to_json(t.D)}, {"E", to_json(t.E)}, {"total", to_json(t.total)}};
}

json hh_json(const HHContext& ctx) {
  const HopfHopfPoint& p = ctx.point;
  const HHEigendata& e = ctx.eig;
  const HHCoefficients& c = ctx.coeffs;
  const Unfolding& u = ctx.unf;
  json j;
  j["point"] = {{"r0_star", p.r0_star}, {"tau_star", p.tau_star},     {"k1", p.k1},
                {"j1", p.j1},           {"k2", p.k2},                 {"j2", p.j2},
                {"omega_plus", p.omega_plus}, {"omega_minus", p.omega_minus},
                {"mismatch", p.mismatch},     {"nearest_resonance", p.nearest_resonance},
                {"resonance_warning", p.resonance_warning},           {"located", ctx.located}};
  j["eigendata"] = {{"p12", to_json(e.p12)},
                    {"p32", to_json(e.p32)},
                    {"q12", to_json(e.q12)},
                    {"q32", to_json(e.q32)},
                    {"D1", to_json(e.D1)},
                    {"D3", to_json(e.D3)},
                    {"char_residual_1", e.char_residual_1},
                    {"char_residual_3", e.char_residual_3},
                    {"normalization_residual_1", e.normalization_residual_1},
                    {"normalization_residual_3", e.normalization_residual_3},
                    {"cross_residual", e.cross_residual}};
  j["linear"] = {{"B11", to_json(c.B11)}, {"B21", to_json(c.B21)}, {"B13", to_json(c.B13)}, {"B23", to_json(c.B23)}};
  j["cubic"] = {{"B2100", cubic_json(c.g2100)},
                {"B1011", cubic_json(c.g1011)},
                {"B0021", cubic_json(c.g0021)},
                {"B1110", cubic_json(c.g1110)}};
  j["unfolding"] = {{"eps1", u.eps1}, {"eps2", u.eps2}, {"d0", u.d0},   {"b0", u.b0},
                    {"c0", u.c0},     {"det", u.det},   {"case", u.case_label},
                    {"nu_map", {{u.nu_map(0, 0), u.nu_map(0, 1)}, {u.nu_map(1, 0), u.nu_map(1, 1)}}}};
  return j;
}

const char* validity_name(LineValidity v) {
  switch (v) {
    case LineValidity::full: return "full";
    case LineValidity::mu2_nonnegative: return "mu2>=0";
    case LineValidity::mu2_nonpositive: return "mu2<=0";
  }
  return "?";
}

void write_bifurcation_set(ArtifactWriter& out, const HHContext& ctx) {
  const BifurcationSet set = bifurcation_lines(ctx.unf, true);
  Csv lines({"name", "slope", "validity", "meaning"});
  auto add = [&](const BifurcationLine& l) {
    lines.cell(l.name).cell(l.slope).cell(validity_name(l.validity)).cell("\"" + l.meaning + "\"");
    lines.end_row();
  };
  for (const auto& l : set.lines) add(l);
  if (set.l4) add(*set.l4);
  out.csv("bifurcation_lines.csv", lines);

  Csv regions({"label", "angle_from", "angle_to", "summary"});
  for (const auto& r : set.regions) {
    regions.cell(r.label).cell(r.angle_from).cell(r.angle_to).cell("\"" + r.summary + "\"");
    regions.end_row();
  }
  out.csv("regions.csv", regions);

  Csv l4({"mu1", "mu2", "tau", "r0"});
  for (const auto& [m1, m2] : set.l4_samples) {
    l4.cell(m1).cell(m2).cell(ctx.point.tau_star + m1).cell(ctx.point.r0_star + m2);
    l4.end_row();
  }
  out.csv("l4_samples.csv", l4);
  out.write_json("hh_report.json", hh_json(ctx));
}

json verdict_json(const AttractorVerdict& v) {
  const AttractorEvidence& e = v.evidence;
  json j{{"class", to_string(v.cls)},
         {"late_variance", e.late_variance},
         {"section_points", e.section_points},
         {"clusters", e.clusters},
         {"max_cluster_diameter", e.max_cluster_diameter},
         {"scale", e.scale},
         {"closed_curve", e.closed_curve},
         {"gap_ratio", e.gap_ratio},
         {"note", e.note}};
  j["period"] = e.period ? json(*e.period) : json(nullptr);
  if (e.divergence) {
    j["divergence"] = {{"rate", e.divergence->rate}, {"spread", e.divergence->spread}, {"rates", e.divergence->rates}};
  } else {
    j["divergence"] = nullptr;
  }
  return j;
}

void write_section(ArtifactWriter& out, const std::string& name, const PoincareSet& s) {
  Csv csv({"t", "u", "v"});
  for (const auto& p : s.points) {
    csv.cell(p.t).cell(p.u).cell(p.v);
    csv.end_row();
  }
  out.csv(name, csv);
}

void write_field(ArtifactWriter& out, const std::string& prefix, const Field& f) {
  std::ostringstream field_csv;
  write_field_csv(field_csv, f);
  out.text(prefix + "field.csv", field_csv.str());
  out.text(prefix + "field.fbf", encode_field_binary(f));
  std::ostringstream ts;
  write_timeseries_csv(ts, f);
  out.text(prefix + "timeseries.csv", ts.str());

  Csv modes({"t", "mode0", "mode1", "mode2", "mode3"});
  const std::size_t stride = std::max<std::size_t>(1, f.t.size() / 5000);
  for (std::size_t i = 0; i < f.t.size(); i += stride) {
    modes.cell(f.t[i]);
    for (int k = 0; k < 4; ++k) modes.cell(f.modes[k][i]);
    modes.end_row();
  }
  out.csv(prefix + "modes.csv", modes);

  json summary{{"params", to_json(f.params)},
               {"grid", {{"M", f.grid.M}, {"dt", f.grid.dt}, {"T", f.grid.T}, {"scheme", to_string(f.grid.scheme)}}},
               {"steady_residual", steady_residual(f)},
               {"neumann_residual", neumann_residual(f)},
               {"min_value", f.min_value},
               {"warnings", f.warnings}};
  out.write_json(prefix + "summary.json", summary);
}

struct SimulationRun {
  ModelParams params;
  SimulationOptions sim;
  ClassifyOptions cls;
  std::pair<HistoryFn, HistoryFn> history;
};

SimulationRun simulation_setup(const RunConfig& cfg, const std::string& u_default, const std::string& v_default,
                               double default_T = 0.0) {
  const Options o(cfg.options);
  SimulationRun run;
  run.params = cfg.params;
  run.sim = o.simulation();
  if (run.sim.grid.T == 0.0) run.sim.grid.T = default_T;
  run.sim.grid = resolve_grid(run.params, run.sim.grid);
  run.cls = o.classify();
  run.sim.checkpoint_time = run.cls.discard_fraction * run.sim.grid.T;
  run.history = o.history(u_default, v_default);
  return run;
}

void log_warnings(std::ostream& log, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) log << "warning: " << w << '\n';
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_equilibria(const RunConfig& cfg, ArtifactWriter& out, std::ostream& log) {
  Csv csv({"kind", "u", "v"});
  json list = json::array();
  for (const Equilibrium& e : equilibria(cfg.params)) {
    const char* kind = e.kind == EquilibriumKind::extinct    ? "extinct"
                       : e.kind == EquilibriumKind::boundary ? "boundary"
                                                             : "positive";
    csv.cell(kind).cell(e.u_star).cell(e.v_star);
    csv.end_row();
    list.push_back({{"kind", kind}, {"u", e.u_star}, {"v", e.v_star}});
    log << kind << ": (" << format_double(e.u_star) << ", " << format_double(e.v_star) << ")\n";
  }
  out.csv("equilibria.csv", csv);
  out.write_json("equilibria.json", {{"H0", check_h0(cfg.params)}, {"equilibria", list}});
  return kOk;
}

int cmd_stability(const RunConfig& cfg, ArtifactWriter& out, std::ostream& log) {
  const Options o(cfg.options);
  const StabilityWindows w = stability_windows(cfg.params, o.number("tau_max", 50.0));
  Csv windows({"window_start", "window_end"});
  for (const auto& iv : w.windows) {
    windows.cell(iv.start).cell(iv.end);
    windows.end_row();
    log << "stable on [" << format_double(iv.start) << ", " << format_double(iv.end) << "]\n";
  }
  out.csv("windows.csv", windows);
  Csv crossings({"tau", "k", "j", "branch", "sign"});
  for (const auto& c : w.crossings) {
    crossings.cell(c.tau).cell(c.k).cell(c.j).cell(to_string(c.branch)).cell(c.sign);
    crossings.end_row();
  }
  out.csv("crossings.csv", crossings);
  Csv modes({"k", "A", "B", "C", "hypothesis", "omega_plus", "omega_minus"});
  for (int k : w.modes) {
    const ModeData md = mode_data(cfg.params, k);
    modes.cell(k).cell(md.A).cell(md.B).cell(md.C).cell(to_string(md.hypothesis));
    modes.cell(md.omega_plus ? format_double(*md.omega_plus) : "");
    modes.cell(md.omega_minus ? format_double(*md.omega_minus) : "");
    modes.end_row();
  }
  out.csv("modes.csv", modes);
  return kOk;
}

void write_curves(const RunConfig& cfg, ArtifactWriter& out, std::ostream& log, std::pair<double, double> range) {
  const Options o(cfg.options);
  const auto [k_lo, k_hi] = o.int_range("k_range", {0, 3});
  const auto [j_lo, j_hi] = o.int_range("j_range", {0, 1});
  const int n = o.integer("samples", 400);
  Csv csv({"r0", "tau", "k", "j", "branch"});
  json skipped = json::array();
  for (int k = k_lo; k <= k_hi; ++k) {
    for (int j = j_lo; j <= j_hi; ++j) {
      for (Branch b : {Branch::plus, Branch::minus}) {
        HopfCurve c;
        try {
          c = hopf_curve(cfg.params, k, j, b, range, n);
        } catch (const ValidationError&) {
          log << "no " << to_string(b) << " branch for k = " << k << " in range\n";
          continue;
        }
        for (const auto& p : c.points) {
          csv.cell(p.r0).cell(p.tau).cell(k).cell(j).cell(to_string(b));
          csv.end_row();
        }
        if (!c.skipped.empty()) {
          skipped.push_back({{"k", k}, {"j", j}, {"branch", to_string(b)}, {"count", c.skipped.size()}});
        }
      }
    }
  }
  out.csv("hopf_curves.csv", csv);
  out.write_json("hopf_curves.json", {{"r0_range", {range.first, range.second}}, {"samples", n}, {"skipped", skipped}});
}

int cmd_hopf_curves(const RunConfig& cfg, ArtifactWriter& out, std::ostream& log) {
  write_curves(cfg, out, log, Options(cfg.options).range("r0_range", {0.1151, 0.3}));
  return kOk;
}

int cmd_hopf_nf(const RunConfig& cfg, ArtifactWriter& out, std::ostream& log) {
  const Options o(cfg.options);
  const HopfReport r = hopf_report(cfg.params, o.integer("k", 0), o.integer("j", 0), o.branch("branch", Branch::plus));
  auto classification = [](const HopfCoefficients& g, const HopfClassification& c) {
    return json{{"g20", to_json(g.g20)}, {"g11", to_json(g.g11)},   {"g02", to_json(g.g02)},
                {"g21", to_json(g.g21)}, {"c1_0", to_json(c.c1_0)}, {"mu2", c.mu2},
                {"beta2", c.beta2},      {"supercritical", c.supercritical},
                {"orbit_stable", c.orbit_stable}, {"degenerate", c.degenerate}};
  };
  json j;
  j["point"] = {{"k", r.point.k}, {"j", r.point.j}, {"branch", to_string(r.point.branch)},
                {"tau", r.point.tau}, {"omega", r.point.omega}};
  j["eigendata"] = {{"p1", to_json(r.eigendata.p1)},
                    {"q2", to_json(r.eigendata.q2)},
                    {"M", to_json(r.eigendata.M)},
                    {"char_residual", r.eigendata.char_residual},
                    {"normalization_residual", r.eigendata.normalization_residual},
                    {"cross_residual", r.eigendata.cross_residual}};
  j["transversality"] = {{"sign", r.transversality.sign},
                         {"closed_form", r.transversality.closed_form},
                         {"dlambda_dtau", to_json(r.transversality.dlambda_dtau)}};
  j["literal"] = classification(r.coefficients, r.classification);
  j["delay_scaled"] = classification(r.coefficients_scaled, r.classification_scaled);
  out.write_json("hopf_report.json", j);
  log << "tau = " << format_double(r.point.tau) << ", omega = " << format_double(r.point.omega)
      << ", c1(0) = " << format_double(r.classification.c1_0.real()) << " + "
      << format_double(r.classification.c1_0.imag()) << "i\n";
  return kOk;
}

int cmd_hh_nf(const RunConfig& cfg, ArtifactWriter& out, std::ostream& log) {
  const HHContext ctx = hh_context(cfg);
  out.write_json("hh_report.json", hh_json(ctx));
  log << "HH at (r0, tau) = (" << format_double(ctx.point.r0_star) << ", " << format_double(ctx.point.tau_star)
      << "), case " << ctx.unf.case_label << '\n';
  if (ctx.point.resonance_warning) log << "warning: omega+/omega- is close to a low-order resonance\n";
  return kOk;
}

int cmd_bifurcation_set(const RunConfig& cfg, ArtifactWriter& out, std::ostream& log) {
  const HHContext ctx = hh_context(cfg);
  write_bifurcation_set(out, ctx);
  log << "case " << ctx.unf.case_label << '\n';
  return kOk;
}

int cmd_bautin(const RunConfig& cfg, ArtifactWriter& out, std::ostream& log) {
  const Options o(cfg.options);
  const BautinPoint b = find_bautin(cfg.params, o.integer("k", 0), o.integer("j", 0), o.branch("branch", Branch::minus),
                                    o.range("r0_range", {0.1607, 1.0}), o.integer("samples", 32));
  out.write_json("bautin.json", {{"r0", b.r0},
                                 {"tau", b.tau},
                                 {"omega", b.omega},
                                 {"re_c1", b.re_c1},
                                 {"bracket", {b.bracket.first, b.bracket.second}},
                                 {"re_c1_left", b.re_c1_left},
                                 {"re_c1_right", b.re_c1_right}});
  log << "Re c1(0) = 0 near (r0, tau) = (" << format_double(b.r0) << ", " << format_double(b.tau) << ")\n";
  return kOk;
}

int cmd_simulate(const RunConfig& cfg, ArtifactWriter& out, std::ostream& log) {
  const SimulationRun run = simulation_setup(cfg, kRegimeU, kRegimeV);
  const Field f = simulate(run.params, run.history.first, run.history.second, run.sim);
  log_warnings(log, f.warnings);
  write_field(out, "", f);
  return kOk;
}

int cmd_poincare(const RunConfig& cfg, ArtifactWriter& out, std::ostream& log) {
  const SimulationRun run = simulation_setup(cfg, kRegimeU, kRegimeV);
  const Field f = simulate(run.params, run.history.first, run.history.second, run.sim);
  const PoincareSet s = poincare_section(f, run.cls.discard_fraction);
  log_warnings(log, f.warnings);
  log_warnings(log, s.warnings);
  write_section(out, "section.csv", s);
  log << s.points.size() << " section points\n";
  return kOk;
}

int cmd_classify(const RunConfig& cfg, ArtifactWriter& out, std::ostream& log) {
  const SimulationRun run = simulation_setup(cfg, kRegimeU, kRegimeV);
  const Field f = simulate(run.params, run.history.first, run.history.second, run.sim);
  const AttractorVerdict v = classify_attractor(f, run.cls);
  log_warnings(log, f.warnings);
  write_section(out, "section.csv", poincare_section(f, run.cls.discard_fraction));
  out.write_json("verdict.json", verdict_json(v));
  log << "verdict: " << to_string(v.cls) << '\n';
  return kOk;
}

// Figures: 1, 2 boundary-equilibrium and Hopf-cycle runs; 3 bifurcation set
// near the Hopf-Hopf point; 4, 5 regime points P1, P2; 6 Poincare sections
// at P3, P4, P5; 7 Hopf curves with the Hopf-Hopf point; 8 coexistence.
int cmd_figure(const RunConfig& cfg, ArtifactWriter& out, std::ostream& log) {
  const Options o(cfg.options);
  const int n = o.integer("figure", 0);

  auto regime = [&](double tau, double r0, const char* u, const char* v, double T, const std::string& prefix) {
    RunConfig local = cfg;
    local.params = cfg.params.with_tau(tau).with_r0(r0);
    const SimulationRun run = simulation_setup(local, u, v, T);
    const Field f = simulate(run.params, run.history.first, run.history.second, run.sim);
    log_warnings(log, f.warnings);
    const AttractorVerdict verdict = classify_attractor(f, run.cls);
    write_field(out, prefix, f);
    write_section(out, prefix + "section.csv", poincare_section(f, run.cls.discard_fraction));
    json j = verdict_json(verdict);
    j["tau"] = tau;
    j["r0"] = r0;
    out.write_json(prefix + "verdict.json", j);
    log << prefix << "(tau, r0) = (" << tau << ", " << r0 << "): " << to_string(verdict.cls) << '\n';
  };

  switch (n) {
    case 1: regime(4.0, 0.12, kFig1U, kFig1V, 0.0, "fig1_"); break;
    case 2: regime(19.0, 0.12, kFig1U, kFig1V, 8000.0, "fig2_"); break;
    case 3: {
      RunConfig local = cfg;
      if (!Options(cfg.options).has("hh_point")) local.options["hh_point"] = {0.1606, 42.5794};
      write_bifurcation_set(out, hh_context(local));
      break;
    }
    case 4: regime(4.0, 0.4, kRegimeU, kRegimeV, 20000.0, "fig4_P1_"); break;
    case 5: regime(25.0, 0.4, kRegimeU, kRegimeV, 20000.0, "fig5_P2_"); break;
    case 6:
      regime(42.4, 0.4, kRegimeU, kRegimeV, 20000.0, "fig6_P3_");
      regime(46.6, 0.4, kRegimeU, kRegimeV, 20000.0, "fig6_P4_");
      regime(47.4, 0.4, kRegimeU, kRegimeV, 20000.0, "fig6_P5_");
      break;
    case 7: {
      write_curves(cfg, out, log, o.range("r0_range", {0.1151, 0.3}));
      write_bifurcation_set(out, hh_context(cfg));
      break;
    }
    case 8: {
      SimulationRun run = simulation_setup(cfg, kRegimeU, kRegimeV, 8000.0);
      const auto high = Options(json::object()).history(kHighU, kHighV);
      const double tau = o.number("tau", 13.0);
      const double r0 = o.number("r0", 0.7);
      const CoexistenceResult res = coexistence_probe(cfg.params, tau, r0, run.history, high, run.sim, run.cls);
      out.write_json("fig8_coexistence.json", {{"tau", tau},
                                               {"r0", r0},
                                               {"low_history", verdict_json(res.a)},
                                               {"high_history", verdict_json(res.b)},
                                               {"bistable", res.bistable}});
      log << "low history: " << to_string(res.a.cls) << ", high history: " << to_string(res.b.cls) << '\n';
      break;
    }
    default: throw ValidationError("reproduce-figure expects a figure number from 1 to 8");
  }
  return kOk;
}

int cmd_regression(const RunConfig& cfg, ArtifactWriter& out, std::ostream& log) {
  const Options o(cfg.options);
  const auto golden = load_golden(o.string("golden", default_golden_path().string()));
  const auto entries = compare(golden, compute_reference_values());
  Csv csv({"id", "expected", "actual", "tolerance", "mode", "status"});
  int failures = 0;
  for (const auto& e : entries) {
    csv.cell(e.item.id).cell(e.item.expected).cell(e.actual ? format_double(*e.actual) : "missing");
    csv.cell(e.item.tolerance).cell(e.item.relative ? "rel" : "abs").cell(e.pass ? "pass" : "fail");
    csv.end_row();
    if (!e.pass) {
      ++failures;
      log << "FAIL " << e.item.id << ": expected " << format_double(e.item.expected) << ", got "
          << (e.actual ? format_double(*e.actual) : "missing") << '\n';
    }
  }
  out.csv("regression.csv", csv);
  log << entries.size() - static_cast<std::size_t>(failures) << "/" << entries.size() << " items pass\n";
  return failures == 0 ? kOk : kRegression;
}

using Handler = std::function<int(const RunConfig&, ArtifactWriter&, std::ostream&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table{
      {"equilibria", cmd_equilibria},   {"stability", cmd_stability},
      {"hopf-curves", cmd_hopf_curves}, {"hopf-nf", cmd_hopf_nf},
      {"hh-nf", cmd_hh_nf},             {"bifurcation-set", cmd_bifurcation_set},
      {"bautin", cmd_bautin},           {"simulate", cmd_simulate},
      {"poincare", cmd_poincare},       {"classify", cmd_classify},
      {"reproduce-figure", cmd_figure}, {"regression", cmd_regression}};
  return table;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, _] : handlers()) v.push_back(name);
    return v;
  }();
  return names;
}

std::filesystem::path default_golden_path() { return FEARBIF_GOLDEN_DEFAULT; }

int run_command(const RunConfig& cfg, std::ostream& log) {
  const auto it = handlers().find(cfg.command);
  if (it == handlers().end()) throw ValidationError("unknown command '" + cfg.command + "'");
  ArtifactWriter out(cfg.output_dir, cfg);
  const int code = it->second(cfg, out, log);
  out.finish({{"exit_code", code}});
  return code;
}

}  // namespace fearbif::app
