// Acceptance run: prints one PASS/FAIL line per criterion and exits nonzero
// when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fearbif/diagnostics.hpp"
#include "fearbif/hopf.hpp"
#include "fearbif/hopf_hopf.hpp"
#include "fearbif/linear_stability.hpp"
#include "fearbif/simulator.hpp"

using namespace fearbif;
using cd = std::complex<double>;

namespace {

const ModelParams kBase = ModelParams::reference();

struct Criterion {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [fails: " << what << "]";
    }
  }
};

bool within(double actual, double expected, double tol) { return std::abs(actual - expected) <= tol; }
bool within_rel(double actual, double expected, double rel) { return within(actual, expected, rel * std::abs(expected)); }
bool parts_rel(cd actual, cd expected, double rel) {
  return within_rel(actual.real(), expected.real(), rel) && within_rel(actual.imag(), expected.imag(), rel);
}

std::string show(cd z) {
  std::ostringstream s;
  s.precision(7);
  s << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return s.str();
}

struct RegimeRun {
  double tau = 0.0;
  double r0 = 0.0;
  AttractorVerdict verdict;
  double seconds = 0.0;
};

HistoryFn expr(double mean, double amp) {
  return [mean, amp](double x, double) { return mean + amp * std::cos(x); };
}

RegimeRun run_regime(double tau, double r0, HistoryFn u0, HistoryFn v0, double T, int seeds) {
  const auto start = std::chrono::steady_clock::now();
  SimulationOptions o;
  o.grid.M = 128;
  o.grid.T = T;
  o.max_snapshots = 0;
  o.checkpoint_time = 0.5 * T;
  const Field f = simulate(kBase.with_tau(tau).with_r0(r0), u0, v0, o);
  ClassifyOptions c;
  c.seeds = seeds;
  RegimeRun run{tau, r0, classify_attractor(f, c), 0.0};
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

void report(int number, const char* title, const Criterion& c, int& failures) {
  std::printf("criterion %2d %s: %s%s\n", number, c.pass ? "PASS" : "FAIL", title, c.detail.str().c_str());
  std::fflush(stdout);
  if (!c.pass) ++failures;
}

// Diffusion-free run compared with a two-component delay integrator that
// uses the same two-step explicit update.
double ode_limit_error() {
  ModelParams p = kBase.with_r0(0.12).with_tau(19.0);
  p.d1 = 0.0;
  p.d2 = 0.0;
  const double dt = 0.01;
  const double T = 300.0;
  SimulationOptions o;
  o.grid.M = 16;
  o.grid.dt = dt;
  o.grid.T = T;
  const Field f = simulate(p, [](double, double) { return 1.3; }, [](double, double) { return 0.004; }, o);

  auto rhs = [&](double u, double v, double ud) {
    return std::pair{u * (p.r0 / (1.0 + p.K * v) - p.d - p.a * ud - p.p * v), v * (-p.r2 + p.c * u - p.m * v)};
  };
  const long lag = std::lround(p.tau / dt);
  std::vector<double> u{1.3};
  double v = 0.004;
  auto [gu, gv] = rhs(1.3, 0.004, 1.3);
  for (long n = 0; n < std::lround(T / dt); ++n) {
    const double ud = n - lag < 0 ? 1.3 : u[static_cast<std::size_t>(n - lag)];
    const auto [fu, fv] = rhs(u.back(), v, ud);
    u.push_back(u.back() + dt * (1.5 * fu - 0.5 * gu));
    v += dt * (1.5 * fv - 0.5 * gv);
    gu = fu;
    gv = fv;
  }
  return std::max((f.u_final.array() - u.back()).abs().maxCoeff(), (f.v_final.array() - v).abs().maxCoeff());
}

}  // namespace

int main() {
  int failures = 0;
  const ModelParams p012 = kBase.with_r0(0.12);

  {
    Criterion c;
    const Equilibrium e = *positive_equilibrium(p012);
    c.detail << " E* = (" << e.u_star << ", " << e.v_star << ")";
    c.require(within(e.u_star, 1.2506, 5e-4) && within(e.v_star, 0.0025, 5e-4), "E* = (1.2506, 0.0025) +- 5e-4");
    report(1, "equilibrium", c, failures);
  }

  const HopfReport hr = hopf_report(p012, 0, 0, Branch::plus);
  {
    Criterion c;
    c.detail << " tau = " << hr.point.tau << ", omega = " << hr.point.omega;
    c.require(within(hr.point.tau, 15.7797, 1e-3), "tau = 15.7797 +- 1e-3");
    c.require(within(hr.point.omega, 0.0996, 1e-3), "omega = 0.0996 +- 1e-3");
    report(2, "Hopf onset", c, failures);
  }
  {
    Criterion c;
    const HopfClassification& k = hr.classification;
    c.detail << " c1(0) = " << show(k.c1_0) << ", beta2 = " << k.beta2 << ", mu2 = " << k.mu2
             << " (delay-scaled mu2 = " << hr.classification_scaled.mu2 << ")";
    c.require(within(k.c1_0.real(), -0.0022, 2e-4), "Re c1 = -0.0022 +- 2e-4");
    c.require(within(k.c1_0.imag(), -0.0032, 3e-4), "Im c1 = -0.0032 +- 3e-4");
    c.require(within(k.beta2, -0.0045, 4e-4), "beta2 = -0.0045 +- 4e-4");
    c.require(k.mu2 > 0.0, "mu2 > 0");
    report(3, "Hopf normal form", c, failures);
  }
  {
    Criterion c;
    const StabilityWindows w = stability_windows(kBase.with_r0(1.0), 45.0);
    const double expected[4][2] = {{0.0, 3.6892}, {10.4124, 16.4128}, {25.4181, 29.1364}, {40.4235, 41.8598}};
    c.require(w.windows.size() == 4, "four windows");
    for (std::size_t i = 0; i < w.windows.size(); ++i) {
      c.detail << " [" << w.windows[i].start << ", " << w.windows[i].end << "]";
      if (i < 4) {
        c.require(within(w.windows[i].start, expected[i][0], 1e-3) && within(w.windows[i].end, expected[i][1], 1e-3),
                  "window " + std::to_string(i));
      }
    }
    report(4, "stability windows at r0 = 1", c, failures);
  }

  const HopfCurve plus = hopf_curve(kBase, 0, 1, Branch::plus, {0.12, 0.3}, 50);
  const HopfCurve minus = hopf_curve(kBase, 0, 0, Branch::minus, {0.12, 0.3}, 50);
  const HopfHopfPoint hh = find_hopf_hopf(plus, minus);
  {
    Criterion c;
    c.detail << " (r0*, tau*) = (" << hh.r0_star << ", " << hh.tau_star << "), omega+ = " << hh.omega_plus
             << ", omega- = " << hh.omega_minus;
    c.require(within(hh.r0_star, 0.1606, 1e-3), "r0* +- 1e-3");
    c.require(within(hh.tau_star, 42.5794, 1e-2), "tau* +- 1e-2");
    c.require(within(hh.omega_plus, 0.1848, 1e-3), "omega+ +- 1e-3");
    c.require(within(hh.omega_minus, 0.1095, 1e-3), "omega- +- 1e-3");
    report(5, "Hopf-Hopf point", c, failures);
  }

  // Coefficients at the Hopf-Hopf point rounded to four decimals.
  const ModelParams at = kBase.with_r0(0.1606);
  const ModeData md = mode_data(at, 0);
  const HHEigendata eig = hh_eigendata(at, 42.5794, *md.omega_plus, *md.omega_minus);
  const HHCoefficients hc = hh_coefficients(at, eig);
  const Unfolding unf = unfolding(hc);
  {
    Criterion c;
    const std::pair<const char*, std::pair<cd, cd>> items[] = {{"B11", {hc.B11, {0.07218, 0.03765}}},
                                                                {"B21", {hc.B21, {22.59131, 12.20126}}},
                                                                {"B13", {hc.B13, {-0.05265, 0.0454}}},
                                                                {"B23", {hc.B23, {-28.24841, 23.62431}}}};
    for (const auto& [name, v] : items) {
      c.detail << " " << name << " = " << show(v.first) << ";";
      c.require(parts_rel(v.first, v.second, 1e-3), name);
    }
    report(6, "linear unfolding coefficients", c, failures);
  }
  {
    Criterion c;
    const std::pair<const char*, std::pair<cd, cd>> items[] = {{"B2100", {hc.g2100.total, {-0.07041, -0.04591}}},
                                                                {"B1011", {hc.g1011.total, {-0.34767, -0.32768}}},
                                                                {"B0021", {hc.g0021.total, {0.1865, -0.04057}}},
                                                                {"B1110", {hc.g1110.total, {0.10178, -0.24012}}}};
    for (const auto& [name, v] : items) {
      c.detail << " " << name << " = " << show(v.first) << ";";
      c.require(parts_rel(v.first, v.second, 1e-3), name);
    }
    report(7, "cubic coefficients", c, failures);
  }
  {
    Criterion c;
    c.detail << " (eps1, eps2, d0) = (" << unf.eps1 << ", " << unf.eps2 << ", " << unf.d0 << "), b0 = " << unf.b0
             << ", c0 = " << unf.c0 << ", d0 - b0 c0 = " << unf.det << ", case " << unf.case_label;
    c.require(unf.eps1 == -1 && unf.eps2 == 1 && unf.d0 == -1, "signs (-1, 1, -1)");
    c.require(within(unf.b0, 1.8642, 5e-3), "b0");
    c.require(within(unf.c0, -1.4456, 5e-3), "c0");
    c.require(within(unf.det, 1.6949, 5e-3), "d0 - b0 c0");
    c.require(unf.case_label == "VIa", "case VIa");
    report(8, "unfolding", c, failures);
  }
  {
    Criterion c;
    const BifurcationSet set = bifurcation_lines(unf, true);
    const std::map<std::string, double> expected{
        {"l1", -536.532}, {"l2", -312.9857}, {"l3", -85.2815}, {"l5", 997.7215}, {"l6", -1157.8669}};
    std::map<std::string, double> got;
    for (const auto& l : set.lines) got[l.name] = l.slope;
    for (const auto& [name, slope] : expected) {
      const bool have = got.count(name) > 0;
      c.detail << " " << name << " = " << (have ? got[name] : std::nan("")) << ";";
      c.require(have && within_rel(got[name], slope, 5e-3), name + " within 0.5%");
    }
    c.detail << " l4 = " << (set.l4 ? set.l4->slope : std::nan(""));
    c.require(set.l4 && got.count("l5") && within_rel(set.l4->slope, got["l5"], 1e-2), "l4 within 1% of l5");
    report(9, "bifurcation-set slopes", c, failures);
  }
  {
    Criterion c;
    const BautinPoint b = find_bautin(kBase, 0, 0, Branch::minus, {0.1607, 1.0}, 32);
    c.detail << " (r0, tau) = (" << b.r0 << ", " << b.tau << "), Re c1 " << b.re_c1_left << " -> " << b.re_c1_right;
    c.require(within(b.r0, 0.682, 5e-3) && within(b.tau, 12.545, 5e-2), "(0.682, 12.545) +- (5e-3, 5e-2)");
    c.require(b.re_c1_left * b.re_c1_right < 0.0, "sign change bracketed");
    report(10, "Bautin point", c, failures);
  }

  // Regime runs at M = 128, also reused by the consistency check below.
  const std::vector<std::pair<RegimeRun, AttractorClass>> regimes = {
      {run_regime(4.0, 0.4, expr(1.25, 0.02), expr(0.1, 0.02), 20000.0, 5), AttractorClass::fixed_point},
      {run_regime(25.0, 0.4, expr(1.25, 0.02), expr(0.1, 0.02), 20000.0, 5), AttractorClass::periodic},
      {run_regime(42.4, 0.4, expr(1.25, 0.02), expr(0.1, 0.02), 20000.0, 5), AttractorClass::torus},
      {run_regime(47.4, 0.4, expr(1.25, 0.02), expr(0.1, 0.02), 20000.0, 5), AttractorClass::chaotic}};
  {
    Criterion c;
    for (const auto& [run, want] : regimes) {
      c.detail << " (" << run.tau << ", " << run.r0 << ") " << to_string(run.verdict.cls) << " in " << run.seconds
               << " s;";
      c.require(run.verdict.cls == want, "(" + std::to_string(run.tau).substr(0, 4) + ", 0.4) expected " + to_string(want));
      c.require(run.seconds <= 60.0, "run time <= 60 s");
    }
    const RegimeRun fig2 = run_regime(19.0, 0.12, expr(1.25, 0.001), expr(0.002, 0.001), 8000.0, 1);
    const double period = fig2.verdict.evidence.period.value_or(std::nan(""));
    c.detail << " (19, 0.12) " << to_string(fig2.verdict.cls) << " with period " << period << " in " << fig2.seconds
             << " s";
    c.require(fig2.verdict.cls == AttractorClass::periodic, "(19, 0.12) periodic");
    c.require(within(period, 63.0, 3.0), "(19, 0.12) period 63 +- 3");
    c.require(fig2.seconds <= 60.0, "run time <= 60 s");
    report(11, "regime reproduction", c, failures);
  }
  {
    Criterion c;
    SimulationOptions o;
    o.grid.M = 128;
    o.grid.T = 8000.0;
    o.max_snapshots = 0;
    const CoexistenceResult r = coexistence_probe(kBase, 13.0, 0.7, {expr(1.25, 0.02), expr(0.1, 0.02)},
                                                  {expr(6.0, 0.02), expr(3.0, 0.02)}, o, ClassifyOptions{});
    c.detail << " history A " << to_string(r.a.cls) << ", history B " << to_string(r.b.cls);
    c.require(r.a.cls == AttractorClass::fixed_point, "history A fixed_point");
    c.require(r.b.cls == AttractorClass::periodic, "history B periodic");
    report(12, "coexistence at (13, 0.7)", c, failures);
  }
  {
    Criterion c;
    // Characteristic and quartic residuals along the ladders at several r0.
    double char_res = 0.0;
    double quartic_res = 0.0;
    bool signs = true;
    for (double r0 : {0.12, 0.1606, 0.4, 1.0}) {
      const ModelParams p = kBase.with_r0(r0);
      for (int k : critical_modes(p)) {
        const ModeData m = mode_data(p, k);
        for (Branch b : {Branch::plus, Branch::minus}) {
          if (!m.omega(b)) continue;
          quartic_res = std::max(quartic_res, m.quartic_residual(*m.omega(b)));
          for (double tau : delay_ladder(p, k, b, 3).tau) {
            char_res = std::max(char_res, std::abs(char_residual(m, cd(0.0, *m.omega(b)), tau)));
          }
          if (m.hypothesis == Hypothesis::H3) signs &= transversality(p, k, b).sign == (b == Branch::plus ? 1 : -1);
        }
      }
    }
    c.detail << " char residual " << char_res << ", quartic residual " << quartic_res << ";";
    c.require(char_res < 1e-10, "characteristic residual");
    c.require(quartic_res < 1e-10, "quartic residual");
    c.require(signs, "transversality signs");

    const HHEigendata exact = hh_eigendata(kBase, hh);
    const double normalization = std::max({hr.eigendata.normalization_residual, hr.eigendata.cross_residual,
                                            exact.normalization_residual_1, exact.normalization_residual_3,
                                            exact.cross_residual});
    c.detail << " bilinear normalization " << normalization << ";";
    c.require(hr.eigendata.normalization_residual < 1e-10 && hr.eigendata.cross_residual < 1e-10,
              "Hopf bilinear normalization");
    c.require(std::max({exact.normalization_residual_1, exact.normalization_residual_3, exact.cross_residual}) < 1e-8,
              "Hopf-Hopf bilinear normalization");

    const double ode = ode_limit_error();
    c.detail << " ODE-limit error " << ode << ";";
    c.require(ode < 1e-6, "ODE-limit oracle");

    // Amplitude system against the PDE runs at the first three regime points.
    for (std::size_t i = 0; i < 3; ++i) {
      const RegimeRun& run = regimes[i].first;
      const double mu1 = run.tau - 42.5794;
      const double mu2 = run.r0 - 0.1606;
      const std::string amp = amplitude_attractor(unf, mu1, mu2);
      const std::string pde = to_string(run.verdict.cls);
      const std::string expected = amp == "equilibrium" ? "fixed_point" : amp;
      c.detail << " (" << run.tau << ", " << run.r0 << ") amplitude " << amp << " vs PDE " << pde << ";";
      c.require(expected == pde, "amplitude/PDE consistency at tau = " + std::to_string(run.tau).substr(0, 4));
    }
    report(13, "property suites", c, failures);
  }

  std::printf("%d of 13 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
