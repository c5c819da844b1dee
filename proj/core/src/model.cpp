#include "fearbif/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fearbif/error.hpp"

namespace fearbif {

namespace {

struct Quadratic {
  double lead;      // K (am + cp)
  double linear;    // am + cp + K (a r2 + c d)
  double constant;  // a r2 + c d - c r0
};

Quadratic equilibrium_quadratic(const ModelParams& q) {
  const double s = q.a * q.m + q.c * q.p;
  const double e = q.a * q.r2 + q.c * q.d;
  return {q.K * s, s + q.K * e, e - q.c * q.r0};
}

// Larger root of lead v^2 + linear v + constant = 0, written in the
// cancellation-free form that also covers lead = 0.
double larger_root(const Quadratic& quad) {
  const double disc = quad.linear * quad.linear - 4.0 * quad.lead * quad.constant;
  return -2.0 * quad.constant / (quad.linear + std::sqrt(disc));
}

void require_positive(const Equilibrium& eq, const char* what) {
  if (eq.kind != EquilibriumKind::positive || eq.u_star <= 0.0 || eq.v_star <= 0.0) {
    throw ValidationError(std::string(what) + ": requires the positive equilibrium");
  }
}

}  // namespace

ModelParams ModelParams::reference(double r0, double tau) {
  ModelParams q;
  q.r0 = r0;
  q.tau = tau;
  return q;
}

void ModelParams::validate() const {
  auto positive = [](double x, const char* name) {
    if (!(std::isfinite(x) && x > 0.0)) {
      throw ValidationError(std::string("parameter ") + name + " must be finite and > 0");
    }
  };
  auto nonnegative = [](double x, const char* name) {
    if (!(std::isfinite(x) && x >= 0.0)) {
      throw ValidationError(std::string("parameter ") + name + " must be finite and >= 0");
    }
  };
  positive(r0, "r0");
  positive(r2, "r2");
  positive(d, "d");
  positive(a, "a");
  positive(p, "p");
  positive(c, "c");
  positive(m, "m");
  positive(l, "l");
  nonnegative(K, "K");
  nonnegative(d1, "d1");
  nonnegative(d2, "d2");
  nonnegative(tau, "tau");
}

bool check_h0(const ModelParams& q) { return q.a * q.r2 + q.c * q.d - q.c * q.r0 < 0.0; }

std::optional<Equilibrium> positive_equilibrium(const ModelParams& q) {
  if (!check_h0(q)) return std::nullopt;
  const double v = larger_root(equilibrium_quadratic(q));
  const double u = (q.r2 + q.m * v) / q.c;
  if (!(u > 0.0 && v > 0.0)) return std::nullopt;
  return Equilibrium{EquilibriumKind::positive, u, v};
}

std::vector<Equilibrium> equilibria(const ModelParams& q) {
  std::vector<Equilibrium> out{{EquilibriumKind::extinct, 0.0, 0.0}};
  if (q.r0 > q.d) out.push_back({EquilibriumKind::boundary, (q.r0 - q.d) / q.a, 0.0});
  if (auto eq = positive_equilibrium(q)) out.push_back(*eq);
  return out;
}

double equilibrium_quadratic_residual(const ModelParams& q, double v) {
  const Quadratic quad = equilibrium_quadratic(q);
  const double t2 = quad.lead * v * v;
  const double t1 = quad.linear * v;
  const double scale = std::max({std::abs(t2), std::abs(t1), std::abs(quad.constant)});
  if (scale == 0.0) return 0.0;
  return std::abs(t2 + t1 + quad.constant) / scale;
}

LinearCoeffs linearize(const ModelParams& q, const Equilibrium& eq) {
  require_positive(eq, "linearize");
  const double u = eq.u_star;
  const double v = eq.v_star;
  const double f = 1.0 + q.K * v;
  return {
      .a12 = -q.K * q.r0 * u / (f * f) - q.p * u,
      .a21 = q.c * v,
      .a22 = -q.m * v,
      .b11 = -q.a * u,
  };
}

NonlinearCoeffs nonlinear_coefficients(const ModelParams& q, const Equilibrium& eq) {
  require_positive(eq, "nonlinear_coefficients");
  const double u = eq.u_star;
  const double f = 1.0 + q.K * eq.v_star;
  const double K2 = q.K * q.K;
  return {
      .alpha1 = -q.K * q.r0 / (f * f) - q.p,
      .alpha2 = K2 * q.r0 * u / (f * f * f),
      .alpha3 = -K2 * q.K * q.r0 * u / (f * f * f * f),
      .alpha4 = K2 * q.r0 / (f * f * f),
      .a = q.a,
      .c = q.c,
      .m = q.m,
  };
}

R0Derivatives r0_derivatives(const ModelParams& q) {
  const auto eq = positive_equilibrium(q);
  if (!eq) throw ValidationError("r0_derivatives: (H0) fails, no positive equilibrium");
  const Quadratic quad = equilibrium_quadratic(q);
  const double u = eq->u_star;
  const double v = eq->v_star;
  // Implicit differentiation of the quadratic; the denominator equals the
  // square root of its discriminant on the "+" branch.
  const double vp = q.c / (2.0 * quad.lead * v + quad.linear);
  const double up = q.m * vp / q.c;
  const double f = 1.0 + q.K * v;
  R0Derivatives out;
  out.u_star_prime = up;
  out.v_star_prime = vp;
  out.a12_hat = -q.K / (f * f * f) * ((up * q.r0 + u) * f - 2.0 * q.K * u * vp * q.r0) - q.p * up;
  out.a21_hat = q.c * vp;
  out.a22_hat = -q.m * vp;
  out.b11_hat = -q.a * up;
  return out;
}

std::pair<double, double> reaction(const ModelParams& q, double u, double v, double u_delayed) {
  const double fu = u * (q.r0 / (1.0 + q.K * v) - q.d - q.a * u_delayed - q.p * v);
  const double fv = v * (-q.r2 + q.c * u - q.m * v);
  return {fu, fv};
}

std::pair<double, double> rhs_residual(const ModelParams& q, double u, double v) {
  return reaction(q, u, v, u);
}

LocalModel local_model(const ModelParams& params) {
  params.validate();
  const auto eq = positive_equilibrium(params);
  if (!eq) throw ValidationError("no positive equilibrium: (H0) fails");
  return {params, *eq, linearize(params, *eq), nonlinear_coefficients(params, *eq)};
}

}  // namespace fearbif
