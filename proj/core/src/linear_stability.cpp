#include "fearbif/linear_stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fearbif/error.hpp"
#include "fearbif/parallel.hpp"

namespace fearbif {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kLadderTolerance = 1e-10;

std::string mode_label(int k, Branch b) {
  return "mode k=" + std::to_string(k) + ", branch " + to_string(b);
}

double clamp_unit(double x) {
  if (std::abs(x) > 1.0 + 1e-12) {
    throw NumericalError("sin(omega tau) outside [-1, 1]: " + std::to_string(x));
  }
  return std::clamp(x, -1.0, 1.0);
}

double tau_of(const ModeData& md, double omega, int j) {
  const double S = clamp_unit(md.S(omega));
  return (std::numbers::pi - std::asin(S) + kTwoPi * j) / omega;
}

void verify_ladder_entry(const ModeData& md, Branch b, double omega, double tau) {
  const double sin_err = std::abs(std::sin(omega * tau) - md.S(omega));
  const double cos_err = std::abs(std::cos(omega * tau) - md.Ck(omega));
  if (sin_err > kLadderTolerance || cos_err > kLadderTolerance) {
    throw NumericalError("critical delay inconsistent with cos(omega tau) condition for " +
                         mode_label(md.k, b) + " (Ck(omega) = " + std::to_string(md.Ck(omega)) +
                         "); the arcsin branch does not apply here");
  }
}

double require_omega(const ModeData& md, Branch b) {
  const auto w = md.omega(b);
  if (!w) {
    throw ValidationError(mode_label(md.k, b) + " not available under hypothesis " +
                          to_string(md.hypothesis));
  }
  return *w;
}

}  // namespace

const char* to_string(Hypothesis h) {
  switch (h) {
    case Hypothesis::H1: return "H1";
    case Hypothesis::H2: return "H2";
    case Hypothesis::H3: return "H3";
  }
  return "?";
}

const char* to_string(Branch b) { return b == Branch::plus ? "+" : "-"; }

double ModeData::S(double w) const {
  const double den = b11 * b11 * w * w + C * C;
  return (A * C * w + B * b11 * w - b11 * w * w * w) / den;
}

double ModeData::Ck(double w) const {
  const double den = b11 * b11 * w * w + C * C;
  return (d1 * b11 * w * w * kk - B * C) / den;
}

double ModeData::quartic_residual(double w) const {
  const double w2 = w * w;
  const double t4 = w2 * w2;
  const double t2 = s * w2;
  const double t0 = B * B - C * C;
  const double scale = std::max({std::abs(t4), std::abs(t2), std::abs(t0)});
  return std::abs(t4 + t2 + t0) / scale;
}

ModeData mode_data(const ModelParams& params, int k) {
  if (k < 0) throw ValidationError("wavenumber must be nonnegative");
  const LocalModel lm = local_model(params);
  const auto& L = lm.lin;
  ModeData md;
  md.k = k;
  md.kk = static_cast<double>(k) * k / (params.l * params.l);
  md.b11 = L.b11;
  md.d1 = params.d1;
  md.A = (params.d1 + params.d2) * md.kk - L.a22;
  md.B = params.d1 * params.d2 * md.kk * md.kk - L.a22 * params.d1 * md.kk - L.a12 * L.a21;
  md.C = -L.b11 * params.d2 * md.kk + L.a22 * L.b11;
  md.s = md.A * md.A - 2.0 * md.B - L.b11 * L.b11;
  const double prod = md.B * md.B - md.C * md.C;  // product of the two omega^2 roots
  md.disc = md.s * md.s - 4.0 * prod;

  const double bc = md.B - md.C;
  if (bc < 0.0) {
    md.hypothesis = Hypothesis::H2;
  } else if (bc > 0.0 && -md.s > 0.0 && md.disc > 0.0) {
    md.hypothesis = Hypothesis::H3;
  } else {
    md.hypothesis = Hypothesis::H1;
    md.boundary_tie = (bc == 0.0) || (md.s == 0.0) || (md.disc == 0.0);
  }

  if (md.hypothesis != Hypothesis::H1) {
    // Larger root from the stable quadratic formula, smaller one from the
    // product of roots to avoid cancellation.
    const double z_plus = 0.5 * (-md.s + std::sqrt(md.disc));
    md.omega_plus = std::sqrt(z_plus);
    if (md.hypothesis == Hypothesis::H3) md.omega_minus = std::sqrt(prod / z_plus);
  }
  return md;
}

std::complex<double> char_residual(const ModeData& md, std::complex<double> lambda, double tau) {
  return lambda * lambda + md.A * lambda + md.B + (-md.b11 * lambda + md.C) * std::exp(-lambda * tau);
}

std::complex<double> char_residual(const ModelParams& params, int k, std::complex<double> lambda,
                                   double tau) {
  return char_residual(mode_data(params, k), lambda, tau);
}

DelayLadder delay_ladder(const ModelParams& params, int k, Branch branch, int j_max) {
  if (j_max < 0) throw ValidationError("j_max must be nonnegative");
  const ModeData md = mode_data(params, k);
  DelayLadder ladder{k, branch, require_omega(md, branch), {}};
  ladder.tau.reserve(static_cast<std::size_t>(j_max) + 1);
  for (int j = 0; j <= j_max; ++j) {
    const double tau = tau_of(md, ladder.omega, j);
    verify_ladder_entry(md, branch, ladder.omega, tau);
    ladder.tau.push_back(tau);
  }
  return ladder;
}

HopfPoint critical_delay(const ModelParams& params, int k, int j, Branch branch) {
  if (j < 0) throw ValidationError("ladder index must be nonnegative");
  const ModeData md = mode_data(params, k);
  const double w = require_omega(md, branch);
  const double tau = tau_of(md, w, j);
  verify_ladder_entry(md, branch, w, tau);
  return {k, j, branch, tau, w};
}

Transversality transversality(const ModelParams& params, int k, Branch branch, int j) {
  const ModeData md = mode_data(params, k);
  const double w = require_omega(md, branch);
  if (!(md.disc > 1e-14 * md.s * md.s)) {
    throw NumericalError("degenerate crossing: omega+ = omega- (zero discriminant) for " +
                         mode_label(k, branch));
  }
  const double tau = tau_of(md, w, j);
  verify_ladder_entry(md, branch, w, tau);

  Transversality t;
  t.sign = branch == Branch::plus ? 1 : -1;
  t.closed_form = t.sign * std::sqrt(md.disc) / (md.C * md.C + md.b11 * md.b11 * w * w);

  const std::complex<double> lam(0.0, w);
  const std::complex<double> e = std::exp(-lam * tau);
  const std::complex<double> delayed = -md.b11 * lam + md.C;
  const std::complex<double> g_lambda = 2.0 * lam + md.A - md.b11 * e - tau * delayed * e;
  const std::complex<double> g_tau = -lam * delayed * e;
  t.dlambda_dtau = -g_tau / g_lambda;
  return t;
}

std::vector<int> critical_modes(const ModelParams& params) {
  constexpr int kTrend = 5;
  constexpr int kMaxModes = 1000000;
  std::vector<int> out;
  int streak = 0;
  double prev_bc = 0.0;
  double prev_ms = 0.0;
  for (int k = 0; k < kMaxModes; ++k) {
    const ModeData md = mode_data(params, k);
    if (md.hypothesis != Hypothesis::H1) out.push_back(k);
    const double bc = md.B - md.C;
    const double ms = -md.s;
    const bool quiet = bc > 0.0 && ms < 0.0;
    const bool trending = k > 0 && bc > prev_bc && ms < prev_ms;
    streak = (quiet && trending) ? streak + 1 : 0;
    prev_bc = bc;
    prev_ms = ms;
    if (streak >= kTrend) return out;
  }
  throw NumericalError("critical-mode scan did not terminate");
}

StabilityWindows stability_windows(const ModelParams& params, double tau_max) {
  if (!(tau_max >= 0.0)) throw ValidationError("tau_max must be nonnegative");
  StabilityWindows res;
  res.tau_max = tau_max;
  res.modes = critical_modes(params);

  for (int k : res.modes) {
    const ModeData md = mode_data(params, k);
    for (Branch b : {Branch::plus, Branch::minus}) {
      const auto w = md.omega(b);
      if (!w) continue;
      const double tau0 = tau_of(md, *w, 0);
      if (tau0 > tau_max) continue;
      const int j_max = static_cast<int>(std::floor((tau_max - tau0) * *w / kTwoPi));
      const DelayLadder ladder = delay_ladder(params, k, b, j_max);
      for (std::size_t j = 0; j < ladder.tau.size(); ++j) {
        if (ladder.tau[j] > tau_max) break;
        res.crossings.push_back(
            {ladder.tau[j], k, static_cast<int>(j), b, b == Branch::plus ? 1 : -1});
      }
    }
  }
  std::sort(res.crossings.begin(), res.crossings.end(),
            [](const HopfCrossing& x, const HopfCrossing& y) { return x.tau < y.tau; });
  for (std::size_t i = 1; i < res.crossings.size(); ++i) {
    if (res.crossings[i].tau - res.crossings[i - 1].tau < 1e-9) {
      throw NumericalError("simultaneous crossings at tau = " +
                           std::to_string(res.crossings[i].tau) +
                           " (Hopf-Hopf degeneracy); use the Hopf-Hopf pathway");
    }
  }

  int unstable_pairs = 0;
  double window_start = 0.0;
  bool in_window = true;
  for (const HopfCrossing& c : res.crossings) {
    unstable_pairs += c.sign;
    if (unstable_pairs < 0) {
      throw NumericalError("negative count of unstable root pairs at tau = " +
                           std::to_string(c.tau));
    }
    if (in_window && unstable_pairs > 0) {
      res.windows.push_back({window_start, c.tau});
      in_window = false;
    } else if (!in_window && unstable_pairs == 0) {
      window_start = c.tau;
      in_window = true;
    }
  }
  if (in_window) res.windows.push_back({window_start, tau_max});
  return res;
}

HopfCurve hopf_curve(const ModelParams& base, int k, int j, Branch branch,
                     std::pair<double, double> r0_range, int n_samples) {
  if (n_samples < 2) throw ValidationError("hopf_curve needs at least two samples");
  const auto [lo, hi] = r0_range;
  if (!(hi > lo)) throw ValidationError("hopf_curve: empty r0 range");

  const auto n = static_cast<std::size_t>(n_samples);
  std::vector<std::optional<CurvePoint>> slots(n);
  parallel_for(n, [&](std::size_t i) {
    const double r0 = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    try {
      const HopfPoint hp = critical_delay(base.with_r0(r0), k, j, branch);
      slots[i] = CurvePoint{r0, hp.tau, hp.omega};
    } catch (const ValidationError&) {
    } catch (const NumericalError&) {
    }
  });

  HopfCurve curve{base, k, j, branch, {}, {}};
  for (std::size_t i = 0; i < n; ++i) {
    const double r0 = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    if (slots[i]) {
      curve.points.push_back(*slots[i]);
    } else {
      curve.skipped.push_back(r0);
    }
  }
  if (curve.points.empty()) {
    throw ValidationError("Hopf curve: " + mode_label(k, branch) + " exists nowhere in range");
  }
  return curve;
}

HopfHopfPoint find_hopf_hopf(const HopfCurve& a, const HopfCurve& b) {
  if (a.branch == b.branch) {
    throw ValidationError("find_hopf_hopf needs one plus and one minus curve");
  }
  const HopfCurve& plus = a.branch == Branch::plus ? a : b;
  const HopfCurve& minus = a.branch == Branch::plus ? b : a;
  const ModelParams& base = plus.base;

  auto delta = [&](double r0) -> std::optional<double> {
    try {
      const ModelParams q = base.with_r0(r0);
      return critical_delay(q, plus.k, plus.j, Branch::plus).tau -
             critical_delay(q, minus.k, minus.j, Branch::minus).tau;
    } catch (const ValidationError&) {
      return std::nullopt;
    } catch (const NumericalError&) {
      return std::nullopt;
    }
  };

  // Common sample grid: the union of both curves' r0 values, ascending.
  std::vector<double> grid;
  for (const auto& p : plus.points) grid.push_back(p.r0);
  for (const auto& p : minus.points) grid.push_back(p.r0);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::optional<std::pair<double, double>> bracket;
  std::optional<double> prev;
  double prev_r = 0.0;
  for (double r : grid) {
    const auto d = delta(r);
    if (d && *d == 0.0) {
      bracket = {r, r};
      break;
    }
    if (d && prev && (*prev < 0.0) != (*d < 0.0)) {
      bracket = {prev_r, r};
      break;
    }
    if (d) {
      prev = d;
      prev_r = r;
    }
  }
  if (!bracket) throw ValidationError("find_hopf_hopf: delay difference does not change sign");

  auto [lo, hi] = *bracket;
  double d_lo = delta(lo).value();
  double mid = lo;
  double d_mid = d_lo;
  for (int it = 0; it < 200 && hi > lo; ++it) {
    mid = 0.5 * (lo + hi);
    const auto dm = delta(mid);
    if (!dm) throw NumericalError("find_hopf_hopf: branch vanished inside bracket");
    d_mid = *dm;
    if (std::abs(d_mid) < 1e-10 || mid == lo || mid == hi) break;
    if ((d_mid < 0.0) == (d_lo < 0.0)) {
      lo = mid;
      d_lo = d_mid;
    } else {
      hi = mid;
    }
  }

  const ModelParams q = base.with_r0(mid);
  const HopfPoint hp = critical_delay(q, plus.k, plus.j, Branch::plus);
  const HopfPoint hm = critical_delay(q, minus.k, minus.j, Branch::minus);
  HopfHopfPoint out;
  out.r0_star = mid;
  out.tau_star = 0.5 * (hp.tau + hm.tau);
  out.k1 = plus.k;
  out.j1 = plus.j;
  out.k2 = minus.k;
  out.j2 = minus.j;
  out.omega_plus = hp.omega;
  out.omega_minus = hm.omega;
  out.mismatch = std::abs(hp.tau - hm.tau);
  const double ratio = hp.omega / hm.omega;
  out.nearest_resonance = 1e300;
  for (double res : {1.0, 2.0, 3.0, 0.5, 1.0 / 3.0, 2.0 / 3.0, 1.5}) {
    out.nearest_resonance = std::min(out.nearest_resonance, std::abs(ratio - res));
  }
  out.resonance_warning = out.nearest_resonance < 1e-3;
  return out;
}

std::optional<std::pair<double, double>> hopf_existence_interval(
    const ModelParams& base, int k, Branch branch, std::pair<double, double> r0_range,
    int n_samples) {
  if (n_samples < 2) throw ValidationError("need at least two samples");
  auto exists = [&](double r0) {
    const ModelParams q = base.with_r0(r0);
    if (!check_h0(q)) return false;
    return mode_data(q, k).omega(branch).has_value();
  };
  const auto [lo, hi] = r0_range;
  std::vector<double> r(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) r[i] = lo + (hi - lo) * i / (n_samples - 1);

  int first = -1;
  int last = -1;
  for (int i = 0; i < n_samples; ++i) {
    if (exists(r[i])) {
      if (first < 0) first = i;
      last = i;
    }
  }
  if (first < 0) return std::nullopt;

  // Refine a boundary between a point that exists (in) and one that does not (out).
  auto refine = [&](double in, double out) {
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (in + out);
      if (mid == in || mid == out) break;
      (exists(mid) ? in : out) = mid;
    }
    return in;
  };
  const double left = first > 0 ? refine(r[first], r[first - 1]) : r[first];
  const double right = last < n_samples - 1 ? refine(r[last], r[last + 1]) : r[last];
  return std::make_pair(left, right);
}

}  // namespace fearbif
