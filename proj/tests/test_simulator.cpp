#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "fearbif/diagnostics.hpp"
#include "fearbif/error.hpp"
#include "fearbif/field_io.hpp"
#include "fearbif/linear_stability.hpp"
#include "fearbif/simulator.hpp"
#include "fearbif/spatial.hpp"

using namespace fearbif;

namespace {

HistoryFn constant(double value) {
  return [value](double, double) { return value; };
}

// Independent integrator for the diffusion-free system: a single point with
// the delayed prey read from a flat array and linearly interpolated.
struct OdeOracle {
  ModelParams p;
  double dt;
  bool second_order;

  std::pair<double, double> f(double u, double v, double ud) const {
    return {u * (p.r0 / (1.0 + p.K * v) - p.d - p.a * ud - p.p * v), v * (-p.r2 + p.c * u - p.m * v)};
  }

  std::pair<double, double> run(double u0, double v0, double T) const {
    const long steps = std::lround(T / dt);
    const double lag = p.tau / dt;
    const long whole = static_cast<long>(std::floor(lag + 1e-12));
    const double frac = std::max(0.0, lag - static_cast<double>(whole));
    std::vector<double> u{u0};
    double v = v0;
    auto delayed = [&](long n) {
      auto at = [&](long i) { return i < 0 ? u0 : u[static_cast<std::size_t>(i)]; };
      return frac < 1e-12 ? at(n - whole) : (1.0 - frac) * at(n - whole) + frac * at(n - whole - 1);
    };
    auto [fu_prev, fv_prev] = f(u0, v0, u0);
    for (long n = 0; n < steps; ++n) {
      const double un = u.back();
      const auto [fu, fv] = f(un, v, delayed(n));
      if (second_order) {
        u.push_back(un + dt * (1.5 * fu - 0.5 * fu_prev));
        v += dt * (1.5 * fv - 0.5 * fv_prev);
      } else {
        u.push_back(un + dt * fu);
        v += dt * fv;
      }
      fu_prev = fu;
      fv_prev = fv;
    }
    return {u.back(), v};
  }
};

double max_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

SimulationOptions options(int M, double dt, double T, Scheme s = Scheme::imex2) {
  SimulationOptions o;
  o.grid.M = M;
  o.grid.dt = dt;
  o.grid.T = T;
  o.grid.scheme = s;
  return o;
}

}  // namespace

TEST_CASE("diffusion-free limit matches an independent delay integrator") {
  for (double tau : {4.0, 19.0, 4.003}) {
    for (Scheme s : {Scheme::imex2, Scheme::imex1}) {
      ModelParams p = ModelParams::reference(0.12, tau);
      p.d1 = 0.0;
      p.d2 = 0.0;
      const double dt = 0.01;
      const double T = 300.0;
      const Field f = simulate(p, constant(1.3), constant(0.004), options(16, dt, T, s));
      const auto [u, v] = OdeOracle{p, dt, s == Scheme::imex2}.run(1.3, 0.004, T);
      CAPTURE(tau);
      CHECK(std::abs(f.u_final(0) - u) < 1e-6);
      CHECK(std::abs(f.v_final(0) - v) < 1e-6);
      CHECK(f.u_final.maxCoeff() - f.u_final.minCoeff() == 0.0);
    }
  }
}

TEST_CASE("homogeneous data stay homogeneous") {
  const ModelParams p = ModelParams::reference(0.12, 19.0);
  const Field f = simulate(p, constant(1.2), constant(0.01), options(64, 0.01, 500.0));
  CHECK(f.u_final.maxCoeff() - f.u_final.minCoeff() < 1e-12);
  CHECK(f.v_final.maxCoeff() - f.v_final.minCoeff() < 1e-12);
  for (int k = 1; k <= 3; ++k) CHECK(std::abs(f.modes[k].back()) < 1e-10);
}

TEST_CASE("temporal convergence order") {
  const ModelParams p = ModelParams::reference(0.12, 4.0);
  auto u0 = [](double x, double) { return 1.25 + 0.05 * std::cos(x / 10.0); };
  auto v0 = [](double x, double) { return 0.002 + 0.001 * std::cos(x / 10.0); };
  for (const auto& [scheme, order] : {std::pair{Scheme::imex1, 1.0}, std::pair{Scheme::imex2, 2.0}}) {
    std::vector<Eigen::VectorXd> finals;
    for (double dt : {0.04, 0.02, 0.01}) finals.push_back(simulate(p, u0, v0, options(64, dt, 20.0, scheme)).u_final);
    const double e1 = max_diff(finals[0], finals[1]);
    const double e2 = max_diff(finals[1], finals[2]);
    const double measured = std::log2(e1 / e2);
    CAPTURE(to_string(scheme));
    CAPTURE(measured);
    CHECK(std::abs(measured - order) <= 0.3);
  }
}

TEST_CASE("period estimate is converged in space") {
  const ModelParams p = ModelParams::reference(0.12, 19.0);
  auto u0 = [](double x, double) { return 1.25 + 0.001 * std::cos(x); };
  auto v0 = [](double x, double) { return 0.002 + 0.001 * std::cos(x); };
  std::vector<double> periods;
  for (int M : {64, 128}) {
    SimulationOptions o = options(M, 0.0, 8000.0);
    o.max_snapshots = 0;
    const Field f = simulate(p, u0, v0, o);
    const std::size_t n = f.t.size();
    const std::vector<double> t(f.t.begin() + static_cast<long>(n / 2), f.t.end());
    const std::vector<double> u(f.u_left.begin() + static_cast<long>(n / 2), f.u_left.end());
    const auto period = estimate_period(t, u);
    REQUIRE(period);
    periods.push_back(*period);
  }
  CAPTURE(periods[0]);
  CAPTURE(periods[1]);
  CHECK(std::abs(periods[0] - periods[1]) < 5e-3 * periods[1]);
}

TEST_CASE("simulations agree with the stability windows") {
  const ModelParams base = ModelParams::reference(1.0);
  const StabilityWindows w = stability_windows(base, 45.0);
  const Equilibrium eq = *positive_equilibrium(base);
  auto u0 = [&](double x, double) {
    return eq.u_star + 0.01 * (1.0 + std::cos(x / 10.0) + std::cos(2.0 * x / 10.0));
  };
  auto v0 = [&](double, double) { return eq.v_star; };
  for (double tau : {2.0, 13.0, 20.0, 27.0, 35.0, 41.0, 43.0}) {
    const bool stable = std::any_of(w.windows.begin(), w.windows.end(),
                                    [&](const TauInterval& iv) { return tau >= iv.start && tau <= iv.end; });
    SimulationOptions o = options(32, 0.01, 6000.0);
    o.max_snapshots = 0;
    o.record_stride = 10;
    const Field f = simulate(base.with_tau(tau), u0, v0, o);
    const std::size_t n = f.t.size();
    auto deviation = [&](std::size_t from, std::size_t to) {
      double m = 0.0;
      for (std::size_t i = from; i < to; ++i) m = std::max(m, std::abs(f.u_left[i] - eq.u_star));
      return m;
    };
    const double early = deviation(n / 4, n / 2);
    const double late = deviation(3 * n / 4, n);
    // A perturbation that already reached rounding level before the early
    // window counts as decayed.
    const bool decays = late < 1e-3 && (late < 0.5 * early || late < 1e-10);
    CAPTURE(tau);
    CAPTURE(early);
    CAPTURE(late);
    CHECK(decays == stable);
  }
}

TEST_CASE("boundary equilibrium run settles and satisfies the boundary condition") {
  const ModelParams p = ModelParams::reference(0.12, 4.0);
  auto u0 = [](double x, double) { return 1.25 + 0.001 * std::cos(x); };
  auto v0 = [](double x, double) { return 0.002 + 0.001 * std::cos(x); };
  const Field f = simulate(p, u0, v0, options(128, 0.0, 0.0));
  const Equilibrium eq = *positive_equilibrium(p);
  CHECK(steady_residual(f) < 1e-8);
  CHECK(neumann_residual(f) < 1e-8);
  CHECK(std::abs(f.u_final.mean() - eq.u_star) < 1e-6);
  CHECK(std::abs(f.v_final.mean() - eq.v_star) < 1e-6);
  CHECK(f.warnings.empty());
  CHECK(classify_attractor(f).cls == AttractorClass::fixed_point);
}

TEST_CASE("resuming from a checkpoint reproduces the uninterrupted run") {
  const ModelParams p = ModelParams::reference(0.12, 19.0);
  auto u0 = [](double x, double) { return 1.25 + 0.05 * std::cos(x / 10.0); };
  auto v0 = constant(0.003);
  SimulationOptions o = options(32, 0.01, 200.0);
  o.checkpoint_time = 100.0;
  const Field full = simulate(p, u0, v0, o);
  REQUIRE(full.checkpoint);
  CHECK(full.checkpoint->t == doctest::Approx(100.0));
  const Field rest = resume(p, *full.checkpoint, o);
  CHECK(max_diff(full.u_final, rest.u_final) == 0.0);
  CHECK(max_diff(full.v_final, rest.v_final) == 0.0);

  const Checkpoint shifted = perturbed(*full.checkpoint, 1e-3, 0.0);
  CHECK(std::abs(shifted.u_history.back()(0) - full.checkpoint->u_history.back()(0) - 1e-3) < 1e-15);
  CHECK(std::abs(shifted.u_history.front()(0) - full.checkpoint->u_history.front()(0) - 1e-3) < 1e-15);
}

TEST_CASE("reruns are bit-identical") {
  const ModelParams p = ModelParams::reference(0.4, 25.0);
  auto u0 = [](double x, double) { return 1.25 + 0.02 * std::cos(x); };
  auto v0 = [](double x, double) { return 0.1 + 0.02 * std::cos(x); };
  const Field a = simulate(p, u0, v0, options(64, 0.0, 300.0));
  const Field b = simulate(p, u0, v0, options(64, 0.0, 300.0));
  CHECK(a.u_left == b.u_left);
  CHECK(a.v_left == b.v_left);
  CHECK(max_diff(a.u_final, b.u_final) == 0.0);
}

TEST_CASE("explicit scheme beyond the diffusive limit blows up") {
  const ModelParams p = ModelParams::reference(0.12, 4.0);
  SimulationOptions o = options(128, 0.2, 400.0, Scheme::explicit_euler);
  const Grid g = resolve_grid(p, o.grid);
  REQUIRE(g.dt > g.cfl_limit(p));
  auto u0 = [](double x, double) { return 1.25 + 0.01 * std::cos(x); };
  CHECK_THROWS_AS((void)simulate(p, u0, constant(0.002), o), NumericalError);

  SimulationOptions ok = options(32, 0.01, 10.0, Scheme::explicit_euler);
  CHECK(simulate(p, u0, constant(0.002), ok).warnings.empty());
}

TEST_CASE("grid validation and defaults") {
  const ModelParams p = ModelParams::reference(0.12, 4.0);
  Grid g;
  g.M = 8;
  CHECK_THROWS_AS((void)resolve_grid(p, g), ValidationError);
  const Grid d = resolve_grid(p, Grid{});
  CHECK(d.dt == 0.01);
  CHECK(resolve_grid(p.with_tau(1.0), Grid{}).dt == doctest::Approx(0.005));
  const double omega = *mode_data(p, 0).omega_plus;
  CHECK(d.T == doctest::Approx(60.0 * 2.0 * std::numbers::pi / omega));
  CHECK_THROWS_AS((void)parse_scheme("rk4"), ValidationError);
  CHECK(parse_scheme("explicit") == Scheme::explicit_euler);
}

TEST_CASE("history buffer interpolates linearly between stored levels") {
  HistoryBuffer h(0.025, 0.01, 1);
  for (std::size_t i = 0; i < h.capacity(); ++i) {
    h.next_slot()(0) = static_cast<double>(i);
    h.commit();
  }
  // Newest level is capacity - 1; the lag of 2.5 steps lands half way between.
  Eigen::VectorXd out(1);
  h.delayed(out);
  CHECK(out(0) == doctest::Approx(static_cast<double>(h.capacity() - 1) - 2.5));
  CHECK(h.back(0)(0) == static_cast<double>(h.capacity() - 1));
}

TEST_CASE("mode projection is orthonormal on the grid") {
  const double l = 10.0;
  const int M = 512;
  const double h = l * std::numbers::pi / (M - 1);
  for (int k = 0; k < 4; ++k) {
    Eigen::VectorXd profile(M);
    for (int j = 0; j < M; ++j) profile(j) = neumann_mode(k, l, j * h);
    for (int i = 0; i < 4; ++i) {
      const double expected = i == k ? 1.0 : 0.0;
      CHECK(std::abs(mode_projection(profile, i, l) - expected) < 1e-3);
    }
  }
}

TEST_CASE("field output formats") {
  const ModelParams p = ModelParams::reference(0.12, 4.0);
  SimulationOptions o = options(16, 0.01, 2.0);
  o.max_snapshots = 5;
  const Field f = simulate(p, constant(1.25), [](double x, double) { return 0.002 + 0.001 * std::cos(x); }, o);

  const std::string bytes = encode_field_binary(f);
  CHECK(bytes.substr(0, 4) == "FBF1");
  const DecodedField d = decode_field_binary(bytes);
  REQUIRE(d.t.size() == f.snapshot_t.size());
  CHECK(d.t == f.snapshot_t);
  CHECK(d.x == f.x);
  for (std::size_t i = 0; i < d.t.size(); ++i) {
    for (int j = 0; j < f.grid.M; ++j) {
      CHECK(d.u[i][static_cast<std::size_t>(j)] == f.snapshot_u[i](j));
      CHECK(d.v[i][static_cast<std::size_t>(j)] == f.snapshot_v[i](j));
    }
  }
  CHECK_THROWS_AS((void)decode_field_binary(bytes.substr(0, bytes.size() - 3)), ValidationError);
  CHECK_THROWS_AS((void)decode_field_binary("XXXX"), ValidationError);

  std::ostringstream csv;
  write_field_csv(csv, f);
  CHECK(csv.str().rfind("t,x,u,v\n", 0) == 0);
  CHECK(csv.str().find('\r') == std::string::npos);
  std::ostringstream ts;
  write_timeseries_csv(ts, f);
  CHECK(ts.str().rfind("t,u0,v0\n", 0) == 0);

  for (double value : {0.1, 1.0 / 3.0, -2.5e-300, 12345.678, 0.0}) {
    CHECK(std::stod(format_double(value)) == value);
  }
  CHECK(format_double(0.1) == "0.1");
}
