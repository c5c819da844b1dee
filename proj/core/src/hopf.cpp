#include "fearbif/hopf.hpp"

#include <cmath>
#include <optional>
#include <string>

#include "fearbif/delay_system.hpp"
#include "fearbif/error.hpp"
#include "fearbif/parallel.hpp"
#include "fearbif/spatial.hpp"

namespace fearbif {

namespace {

constexpr cd kI(0.0, 1.0);

// Value at theta of w projected onto gamma_{n0}^2, i.e. the quantity the
// cubic coefficient actually sees after spatial integration.
CVec2 projected_value(const SecondOrderTerm& w, const HopfEigendata& eig, double gamma3,
                      double theta) {
  const cd phase = kI * eig.omega * eig.tau_bar * theta;
  CVec2 out = (w.coef_plus * eig.p0() * std::exp(phase) +
               w.coef_minus * eig.p0().conjugate() * std::exp(-phase)) *
              gamma3;
  for (const ModeVector& mv : w.modes) out += mv.E * std::exp(w.rate * theta) * mv.projection;
  return out;
}

}  // namespace

HopfEigendata hopf_eigendata(const ModelParams& params, int k, double tau_bar, double omega) {
  const LocalModel lm = local_model(params);
  const DelaySystem sys(lm, tau_bar);

  HopfEigendata eig;
  eig.n0 = k;
  eig.omega = omega;
  eig.tau_bar = tau_bar;
  const CVec2 p = sys.right_eigenvector(k, omega);
  const CRow2 q = sys.left_eigenvector(k, omega);
  eig.p1 = p(1);
  eig.q2 = q(1);

  const cd lambda = kI * omega * tau_bar;
  const cd den = 1.0 + eig.p1 * eig.q2 + tau_bar * lm.lin.b11 * std::exp(-lambda);
  if (std::abs(den) < 1e-12) throw NumericalError("hopf_eigendata: singular normalization");
  eig.M = 1.0 / den;

  eig.char_residual = (sys.characteristic_matrix(k, lambda) * p).norm();
  const CRow2 q0 = eig.q0();
  const CVec2 p0 = eig.p0();
  auto psi = [&](double s) -> CRow2 { return q0 * std::exp(-lambda * s); };
  const cd pair = sys.bilinear_form(psi, [&](double th) -> CVec2 { return p0 * std::exp(lambda * th); });
  const cd cross = sys.bilinear_form(
      psi, [&](double th) -> CVec2 { return p0.conjugate() * std::exp(std::conj(lambda) * th); });
  eig.normalization_residual = std::abs(pair - 1.0);
  eig.cross_residual = std::abs(cross);
  return eig;
}

HopfCoefficients g_coefficients(const HopfEigendata& eig, const LocalModel& lm, ForcingScale scale) {
  const NonlinearCoeffs& nl = lm.nl;
  const DelaySystem sys(lm, eig.tau_bar);
  const double tau = eig.tau_bar;
  const double wt = eig.omega * tau;
  const double l = lm.params.l;
  const int n0 = eig.n0;

  const cd p1 = eig.p1;
  const cd pb = std::conj(p1);
  const cd q2 = eig.q2;
  const cd M = eig.M;
  const cd e = std::exp(-kI * wt);
  const cd eb = std::conj(e);
  const double a = nl.a, c = nl.c, m = nl.m;

  const double gamma3 = mode_product_integral({n0, n0, n0}, l);
  const double gamma4 = mode_product_integral({n0, n0, n0, n0}, l);

  HopfCoefficients out;
  out.scale = scale;
  out.g20 = 2.0 * tau * M * (nl.alpha1 * p1 - a * e + nl.alpha2 * p1 * p1 + c * q2 * p1 - m * q2 * p1 * p1) * gamma3;
  out.g11 = tau * M *
            ((nl.alpha1 + c * q2) * (p1 + pb) - a * (eb + e) + 2.0 * p1 * pb * (nl.alpha2 - m * q2)) *
            gamma3;
  out.g02 = 2.0 * tau * M * (nl.alpha1 * pb - a * eb + nl.alpha2 * pb * pb + c * q2 * pb - m * q2 * pb * pb) * gamma3;

  const CVec2 F20(2.0 * (nl.alpha1 * p1 - a * e + nl.alpha2 * p1 * p1), 2.0 * (c * p1 - m * p1 * p1));
  const CVec2 F11(nl.alpha1 * (p1 + pb) - a * (eb + e) + 2.0 * nl.alpha2 * p1 * pb,
                  c * (p1 + pb) - 2.0 * m * p1 * pb);
  const double forcing = scale == ForcingScale::delay_scaled ? tau : 1.0;

  out.w20.coef_plus = -out.g20 / (kI * wt);
  out.w20.coef_minus = -std::conj(out.g02) / (3.0 * kI * wt);
  out.w20.rate = 2.0 * kI * wt;
  out.w11.coef_plus = out.g11 / (kI * wt);
  out.w11.coef_minus = -std::conj(out.g11) / (kI * wt);
  out.w11.rate = 0.0;

  std::vector<int> modes{0};
  if (n0 != 0) modes.push_back(2 * n0);
  for (int n : modes) {
    const double proj = mode_product_integral({n0, n0, n}, l);
    const CVec2 E1 = solve_guarded(sys.characteristic_matrix(n, 2.0 * kI * wt), forcing * proj * F20, "E1 system");
    const CVec2 E2 = solve_guarded(sys.characteristic_matrix(n, 0.0), forcing * proj * F11, "E2 system");
    out.w20.modes.push_back({n, proj, E1});
    out.w11.modes.push_back({n, proj, E2});
  }

  const CVec2 w20_0 = projected_value(out.w20, eig, gamma3, 0.0);
  const CVec2 w20_1 = projected_value(out.w20, eig, gamma3, -1.0);
  const CVec2 w11_0 = projected_value(out.w11, eig, gamma3, 0.0);
  const CVec2 w11_1 = projected_value(out.w11, eig, gamma3, -1.0);

  const cd Q1 = (nl.alpha1 + c * q2) * (w11_0(1) + 0.5 * w20_0(1) + 0.5 * w20_0(0) * pb + p1 * w11_0(0)) +
                (nl.alpha2 - m * q2) * (2.0 * p1 * w11_0(1) + pb * w20_0(1)) -
                a * (w11_1(0) + 0.5 * w20_1(0) + 0.5 * w20_0(0) * eb + w11_0(0) * e);
  const cd cubic = 3.0 * nl.alpha3 * p1 * p1 * pb + nl.alpha4 * (2.0 * p1 * pb + p1 * p1);
  out.g21 = 2.0 * tau * M * (cubic * gamma4 + Q1);
  return out;
}

HopfClassification hopf_classification(const HopfCoefficients& g, double omega_tau,
                                       double re_lambda_prime) {
  if (re_lambda_prime == 0.0 || !std::isfinite(re_lambda_prime)) {
    throw ValidationError("hopf_classification: transversality value must be nonzero");
  }
  HopfClassification out;
  out.c1_0 = kI / (2.0 * omega_tau) *
                 (g.g11 * g.g20 - 2.0 * std::norm(g.g11) - std::norm(g.g02) / 3.0) +
             0.5 * g.g21;
  out.beta2 = 2.0 * out.c1_0.real();
  out.mu2 = -out.c1_0.real() / re_lambda_prime;
  out.supercritical = out.mu2 > 0.0;
  out.orbit_stable = out.beta2 < 0.0;
  out.degenerate = std::abs(out.c1_0.real()) < 1e-9;
  return out;
}

HopfReport hopf_report(const ModelParams& params, int k, int j, Branch branch) {
  HopfReport r;
  r.params = params;
  r.point = critical_delay(params, k, j, branch);
  r.params.tau = r.point.tau;
  r.eigendata = hopf_eigendata(params, k, r.point.tau, r.point.omega);
  r.transversality = transversality(params, k, branch, j);
  const LocalModel lm = local_model(params);
  const double wt = r.point.omega * r.point.tau;
  r.coefficients = g_coefficients(r.eigendata, lm, ForcingScale::literal);
  r.classification = hopf_classification(r.coefficients, wt, r.transversality.closed_form);
  r.coefficients_scaled = g_coefficients(r.eigendata, lm, ForcingScale::delay_scaled);
  r.classification_scaled = hopf_classification(
      r.coefficients_scaled, wt, r.point.tau * r.transversality.dlambda_dtau.real());
  return r;
}

double re_c1_along_curve(const ModelParams& base, int k, int j, Branch branch, double r0,
                         ForcingScale scale) {
  const ModelParams q = base.with_r0(r0);
  const HopfPoint hp = critical_delay(q, k, j, branch);
  const HopfEigendata eig = hopf_eigendata(q, k, hp.tau, hp.omega);
  const HopfCoefficients g = g_coefficients(eig, local_model(q), scale);
  // The transversality value does not affect c1(0); pass a placeholder.
  return hopf_classification(g, hp.omega * hp.tau, 1.0).c1_0.real();
}

BautinPoint find_bautin(const ModelParams& base, int k, int j, Branch branch,
                        std::pair<double, double> r0_range, int n_samples, ForcingScale scale) {
  if (n_samples < 2) throw ValidationError("find_bautin needs at least two samples");
  const auto [lo, hi] = r0_range;
  const auto n = static_cast<std::size_t>(n_samples);
  std::vector<std::optional<double>> values(n);
  auto r_at = [&](std::size_t i) {
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  };
  parallel_for(n, [&](std::size_t i) {
    try {
      values[i] = re_c1_along_curve(base, k, j, branch, r_at(i), scale);
    } catch (const ValidationError&) {
    } catch (const NumericalError&) {
    }
  });

  std::optional<std::size_t> left;
  std::optional<std::size_t> right;
  std::optional<std::size_t> prev;
  for (std::size_t i = 0; i < n; ++i) {
    if (!values[i]) continue;
    if (prev && (*values[*prev] < 0.0) != (*values[i] < 0.0)) {
      left = prev;
      right = i;
      break;
    }
    prev = i;
  }
  if (!left) throw ValidationError("find_bautin: Re c1(0) does not change sign along the curve");

  double a = r_at(*left);
  double b = r_at(*right);
  double fa = *values[*left];
  double fb = *values[*right];
  BautinPoint out;
  double mid = a;
  double fm = fa;
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (a + b);
    fm = re_c1_along_curve(base, k, j, branch, mid, scale);
    if (std::abs(fm) < 1e-10 && b - a < 1e-10) break;
    if ((fm < 0.0) == (fa < 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
      fb = fm;
    }
    if (b - a < 1e-12) break;
  }
  const HopfPoint hp = critical_delay(base.with_r0(mid), k, j, branch);
  out.r0 = mid;
  out.tau = hp.tau;
  out.omega = hp.omega;
  out.re_c1 = fm;
  out.bracket = {a, b};
  out.re_c1_left = fa;
  out.re_c1_right = fb;
  return out;
}

}  // namespace fearbif
