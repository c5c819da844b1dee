#include <doctest.h>

#include <cmath>
#include <random>

#include "fearbif/error.hpp"
#include "fearbif/model.hpp"
#include "fearbif/spatial.hpp"
#include "support.hpp"

using namespace fearbif;
using fearbif::testing::close_rel;

namespace {

// The prey reaction written out independently in long double, in shifted
// variables (x, y, xd) around (u*, v*).
struct PreyReaction {
  ModelParams p;
  long double us, vs;
  long double operator()(long double x, long double y, long double xd) const {
    const long double u = us + x;
    const long double v = vs + y;
    const long double ud = us + xd;
    return u * (p.r0 / (1.0L + p.K * v) - p.d - p.a * ud - p.p * v);
  }
};

// Fourth-order accurate central third derivative by Richardson extrapolation.
template <class F>
long double third_derivative(F f, long double h) {
  auto d3 = [&](long double s) { return (f(2 * s) - 2 * f(s) + 2 * f(-s) - f(-2 * s)) / (2 * s * s * s); };
  return (4 * d3(h / 2) - d3(h)) / 3;
}

}  // namespace

TEST_CASE("positive equilibrium at the reference parameters") {
  const auto eq = positive_equilibrium(ModelParams::reference(0.12));
  REQUIRE(eq);
  CHECK(eq->kind == EquilibriumKind::positive);
  CHECK(std::abs(eq->u_star - 1.2506) < 5e-4);
  CHECK(std::abs(eq->v_star - 0.0025) < 5e-4);
}

TEST_CASE("existence condition") {
  CHECK(check_h0(ModelParams::reference(0.12)));
  // The threshold is r0 = d + a r2 / c = 0.115.
  CHECK_FALSE(check_h0(ModelParams::reference(0.114)));
  CHECK(check_h0(ModelParams::reference(0.116)));
  ModelParams p = ModelParams::reference();
  p.r0 = p.d;
  CHECK_FALSE(check_h0(p));
  CHECK_FALSE(positive_equilibrium(ModelParams::reference(0.114)));
  CHECK(equilibria(ModelParams::reference(0.114)).size() == 2);
}

TEST_CASE("equilibrium residuals on random admissible parameters") {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 200; ++trial) {
    const ModelParams p = fearbif::testing::random_params(gen);
    const auto eq = positive_equilibrium(p);
    REQUIRE(eq);
    CHECK(equilibrium_quadratic_residual(p, eq->v_star) < 1e-12);
    const auto [fu, fv] = rhs_residual(p, eq->u_star, eq->v_star);
    CHECK(std::abs(fu) < 1e-10);
    CHECK(std::abs(fv) < 1e-10);
  }
}

TEST_CASE("trivial and boundary equilibria are steady") {
  const ModelParams p = ModelParams::reference(0.3);
  const auto [a, b] = rhs_residual(p, 0.0, 0.0);
  CHECK(a == 0.0);
  CHECK(b == 0.0);
  const auto [c, d] = rhs_residual(p, (p.r0 - p.d) / p.a, 0.0);
  CHECK(std::abs(c) < 1e-14);
  CHECK(d == 0.0);
  const auto eq = positive_equilibrium(ModelParams::reference(0.1606));
  REQUIRE(eq);
  const auto [e, f] = rhs_residual(ModelParams::reference(0.1606), eq->u_star, eq->v_star);
  CHECK(std::abs(e) < 1e-12);
  CHECK(std::abs(f) < 1e-12);
}

TEST_CASE("v* increases with r0") {
  double previous = 0.0;
  for (double r0 = 0.1151; r0 < 10.0; r0 += 0.05) {
    const auto eq = positive_equilibrium(ModelParams::reference(r0));
    REQUIRE(eq);
    CHECK(eq->v_star > previous);
    previous = eq->v_star;
  }
}

TEST_CASE("linearization entries") {
  const ModelParams p = ModelParams::reference(0.12);
  const Equilibrium eq = *positive_equilibrium(p);
  const LinearCoeffs lin = linearize(p, eq);
  CHECK(std::abs(lin.a21 - 0.4 * eq.v_star) < 1e-15);
  CHECK(std::abs(lin.a22 + 0.1 * eq.v_star) < 1e-15);
  CHECK(std::abs(lin.b11 + 0.06 * eq.u_star) < 1e-15);

  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 100; ++trial) {
    const ModelParams q = fearbif::testing::random_params(gen);
    const LinearCoeffs l = linearize(q, *positive_equilibrium(q));
    CHECK(l.a12 < 0.0);
    CHECK(l.a21 > 0.0);
    CHECK(l.a22 < 0.0);
    CHECK(l.b11 < 0.0);
  }

  ModelParams fearless = p;
  fearless.K = 0.0;
  const Equilibrium e0 = *positive_equilibrium(fearless);
  CHECK(std::abs(linearize(fearless, e0).a12 + fearless.p * e0.u_star) < 1e-15);
}

TEST_CASE("nonlinear coefficients match a finite-difference Taylor expansion") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    const ModelParams p = trial == 0 ? ModelParams::reference(0.12) : fearbif::testing::random_params(gen);
    const Equilibrium eq = *positive_equilibrium(p);
    const NonlinearCoeffs nl = nonlinear_coefficients(p, eq);
    const PreyReaction f{p, eq.u_star, eq.v_star};
    const long double h = 1e-5L;

    const long double fxy = (f(h, h, 0) - f(h, -h, 0) - f(-h, h, 0) + f(-h, -h, 0)) / (4 * h * h);
    const long double fyy = (f(0, h, 0) - 2 * f(0, 0, 0) + f(0, -h, 0)) / (h * h);
    const long double fxxd = (f(h, 0, h) - f(h, 0, -h) - f(-h, 0, h) + f(-h, 0, -h)) / (4 * h * h);
    const long double fyyy = third_derivative([&](long double s) { return f(0, s, 0); }, 1e-3L);
    // The prey reaction is linear in x, so a central x-difference is exact
    // up to rounding; its second y-derivative gives the x y^2 coefficient.
    auto slope = [&](long double y) { return (f(1e-4L, y, 0) - f(-1e-4L, y, 0)) / 2e-4L; };
    auto d2 = [&](long double s) { return (slope(s) - 2 * slope(0) + slope(-s)) / (s * s); };
    const long double fxyy = (4 * d2(5e-5L) - d2(1e-4L)) / 3;

    CHECK(close_rel(nl.alpha1, static_cast<double>(fxy), 1e-6));
    if (p.K > 0.0) {
      CHECK(close_rel(nl.alpha2, static_cast<double>(fyy / 2), 1e-6));
      CHECK(close_rel(nl.alpha3, static_cast<double>(fyyy / 6), 1e-6));
      CHECK(close_rel(nl.alpha4, static_cast<double>(fxyy / 2), 1e-6));
      CHECK(close_rel(nl.alpha3 / nl.alpha2, -p.K / (1.0 + p.K * eq.v_star), 1e-12));
    }
    CHECK(close_rel(-nl.a, static_cast<double>(fxxd), 1e-6));
    CHECK(nl.c == p.c);
    CHECK(nl.m == p.m);
  }
}

TEST_CASE("nonlinear coefficients without fear") {
  ModelParams p = ModelParams::reference(0.12);
  p.K = 0.0;
  const NonlinearCoeffs nl = nonlinear_coefficients(p, *positive_equilibrium(p));
  CHECK(nl.alpha1 == -p.p);
  CHECK(nl.alpha2 == 0.0);
  CHECK(nl.alpha3 == 0.0);
  CHECK(nl.alpha4 == 0.0);
}

TEST_CASE("r0 derivatives of the equilibrium") {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 50; ++trial) {
    const ModelParams p = trial == 0 ? ModelParams::reference(0.1606) : fearbif::testing::random_params(gen);
    const R0Derivatives dr = r0_derivatives(p);
    const double h = 1e-6;
    const double fd =
        (positive_equilibrium(p.with_r0(p.r0 + h))->v_star - positive_equilibrium(p.with_r0(p.r0 - h))->v_star) /
        (2 * h);
    CHECK(close_rel(dr.v_star_prime, fd, 1e-5));
    CHECK(close_rel(dr.u_star_prime, p.m * dr.v_star_prime / p.c, 1e-14));
    CHECK(dr.a22_hat < 0.0);
    CHECK(close_rel(dr.a22_hat, -p.m * dr.v_star_prime, 1e-14));
  }
}

TEST_CASE("parameter validation") {
  ModelParams p = ModelParams::reference();
  p.a = -1.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = ModelParams::reference();
  p.tau = -0.1;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = ModelParams::reference();
  p.K = 0.0;
  p.d1 = 0.0;
  p.d2 = 0.0;
  CHECK_NOTHROW(p.validate());
  CHECK_THROWS_AS((void)local_model(ModelParams::reference(0.1)), ValidationError);
}

TEST_CASE("Neumann eigenfunction integrals") {
  const double l = 10.0;
  const double L = l * std::acos(-1.0);
  CHECK(std::abs(mode_product_integral({0, 0}, l) - 1.0) < 1e-14);
  CHECK(std::abs(mode_product_integral({0, 0, 0}, l) - 1.0 / std::sqrt(L)) < 1e-14);
  CHECK(std::abs(mode_product_integral({0, 0, 0, 0}, l) - 1.0 / L) < 1e-14);
  CHECK(std::abs(mode_product_integral({1, 2}, l)) < 1e-14);
  CHECK(std::abs(mode_product_integral({3, 3}, l) - 1.0) < 1e-14);

  // Compare the product rule against composite Simpson quadrature.
  const int ks[][3] = {{1, 1, 2}, {1, 2, 3}, {2, 2, 0}, {1, 1, 1}};
  for (const auto& k : ks) {
    const int n = 20000;
    const double h = L / n;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double x = i * h;
      const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      sum += w * neumann_mode(k[0], l, x) * neumann_mode(k[1], l, x) * neumann_mode(k[2], l, x);
    }
    CHECK(std::abs(mode_product_integral({k[0], k[1], k[2]}, l) - sum * h / 3.0) < 1e-10);
  }
}
