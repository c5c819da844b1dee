#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <random>

#include "fearbif/error.hpp"
#include "fearbif/linear_stability.hpp"
#include "support.hpp"

using namespace fearbif;
using cd = std::complex<double>;

namespace {

// Newton iteration on the characteristic function of mode k with a
// numerically differentiated Jacobian; returns the root or nothing.
std::optional<cd> newton_root(const ModeData& md, cd z, double tau) {
  for (int it = 0; it < 60; ++it) {
    const cd f = char_residual(md, z, tau);
    const cd h = 1e-7;
    const cd df = (char_residual(md, z + h, tau) - char_residual(md, z - h, tau)) / (2.0 * h);
    if (std::abs(df) < 1e-300) return std::nullopt;
    const cd step = f / df;
    z -= step;
    if (std::abs(z) > 50.0) return std::nullopt;
    if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(z))) break;
  }
  if (std::abs(char_residual(md, z, tau)) > 1e-11) return std::nullopt;
  return z;
}

// Largest real part found by a Newton scan seeded on a 40x40 grid.
double spectral_abscissa_scan(const ModelParams& p, double tau, int k_max) {
  double best = -1e300;
  for (int k = 0; k <= k_max; ++k) {
    const ModeData md = mode_data(p, k);
    for (int i = 0; i < 40; ++i) {
      for (int j = 0; j < 40; ++j) {
        const cd seed(-1.0 + 1.5 * i / 39.0, 2.0 * j / 39.0);
        if (const auto r = newton_root(md, seed, tau)) best = std::max(best, r->real());
      }
    }
  }
  return best;
}

bool inside(const StabilityWindows& w, double tau) {
  for (const auto& iv : w.windows) {
    if (tau >= iv.start && tau <= iv.end) return true;
  }
  return false;
}

// Root of the characteristic function tracked from i omega at tau0 to tau.
cd track_root(const ModeData& md, cd start, double tau0, double tau) {
  cd z = start;
  const int steps = 10;
  for (int s = 1; s <= steps; ++s) {
    const double t = tau0 + (tau - tau0) * s / steps;
    z = newton_root(md, z, t).value();
  }
  return z;
}

}  // namespace

TEST_CASE("characteristic function has conjugate symmetry") {
  const ModelParams p = ModelParams::reference(0.3);
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 4; ++k) {
    for (int trial = 0; trial < 20; ++trial) {
      const cd z(u(gen), u(gen));
      const double tau = 10.0 + 5.0 * u(gen);
      const cd a = char_residual(p, k, std::conj(z), tau);
      const cd b = std::conj(char_residual(p, k, z, tau));
      CHECK(std::abs(a - b) <= 1e-14 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST_CASE("zero is never a characteristic root and the undelayed case reduces to a quadratic") {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 50; ++trial) {
    const ModelParams p = fearbif::testing::random_params(gen);
    for (int k = 0; k < 5; ++k) {
      const ModeData md = mode_data(p, k);
      CHECK(md.B + md.C > 0.0);
      const cd tr = md.A - md.b11;
      const cd det = md.B + md.C;
      const cd root = (-tr + std::sqrt(tr * tr - 4.0 * det)) / 2.0;
      CHECK(std::abs(char_residual(md, root, 0.0)) < 1e-12 * std::max(1.0, std::norm(root)));
    }
  }
}

TEST_CASE("mode data at the reference parameters") {
  const ModeData md = mode_data(ModelParams::reference(0.12), 0);
  const LinearCoeffs lin = linearize(ModelParams::reference(0.12), *positive_equilibrium(ModelParams::reference(0.12)));
  CHECK(md.hypothesis == Hypothesis::H3);
  REQUIRE(md.omega_plus);
  REQUIRE(md.omega_minus);
  CHECK(std::abs(*md.omega_plus - 0.0996) < 1e-3);
  CHECK(*md.omega_plus > *md.omega_minus);
  CHECK(md.quartic_residual(*md.omega_plus) < 1e-10);
  CHECK(md.quartic_residual(*md.omega_minus) < 1e-10);
  CHECK(std::abs(md.A + lin.a22) < 1e-15);
  CHECK(std::abs(md.B + lin.a12 * lin.a21) < 1e-15);
  CHECK(std::abs(md.C - lin.a22 * lin.b11) < 1e-15);

  const ModeData hh = mode_data(ModelParams::reference(0.1606), 0);
  CHECK(std::abs(*hh.omega_plus - 0.1848) < 1e-3);
  CHECK(std::abs(*hh.omega_minus - 0.1095) < 1e-3);
}

TEST_CASE("quartic roots on random parameters") {
  std::mt19937_64 gen(9);
  int h3 = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const ModelParams p = fearbif::testing::random_params(gen);
    for (int k = 0; k < 4; ++k) {
      const ModeData md = mode_data(p, k);
      if (md.hypothesis != Hypothesis::H3) continue;
      ++h3;
      CHECK(md.quartic_residual(*md.omega_plus) < 1e-10);
      CHECK(md.quartic_residual(*md.omega_minus) < 1e-10);
      CHECK(*md.omega_plus > *md.omega_minus);
    }
  }
  CHECK(h3 > 0);
}

TEST_CASE("delay ladder entries satisfy both trigonometric conditions") {
  for (double r0 : {0.12, 0.1606, 0.5, 1.0}) {
    const ModelParams p = ModelParams::reference(r0);
    for (int k : critical_modes(p)) {
      for (Branch b : {Branch::plus, Branch::minus}) {
        const ModeData md = mode_data(p, k);
        if (!md.omega(b)) continue;
        const DelayLadder ladder = delay_ladder(p, k, b, 4);
        const double w = ladder.omega;
        for (std::size_t j = 0; j < ladder.tau.size(); ++j) {
          const double S = md.S(w);
          const double C = md.Ck(w);
          CHECK(std::abs(S * S + C * C - 1.0) < 1e-10);
          CHECK(C < 0.0);
          CHECK(std::abs(std::sin(w * ladder.tau[j]) - S) < 1e-10);
          CHECK(std::abs(std::cos(w * ladder.tau[j]) - C) < 1e-10);
          CHECK(std::abs(char_residual(md, cd(0.0, w), ladder.tau[j])) < 1e-10);
          if (j > 0) CHECK(std::abs(ladder.tau[j] - ladder.tau[j - 1] - 2.0 * std::numbers::pi / w) < 1e-10);
        }
      }
    }
  }
}

TEST_CASE("critical delay at the reference parameters") {
  const ModelParams p = ModelParams::reference(0.12);
  const HopfPoint h = critical_delay(p, 0, 0, Branch::plus);
  CHECK(std::abs(h.tau - 15.7797) < 1e-3);
  CHECK(std::abs(char_residual(p, 0, cd(0.0, h.omega), h.tau)) < 1e-8);

  const ModelParams q = ModelParams::reference(0.1606);
  CHECK(std::abs(critical_delay(q, 0, 0, Branch::minus).tau - 42.5794) < 2e-2);
  CHECK(std::abs(critical_delay(q, 0, 1, Branch::plus).tau - 42.5794) < 2e-2);
}

TEST_CASE("transversality signs and root-continuation oracle") {
  for (double r0 : {0.12, 0.1606, 0.4, 1.0}) {
    const ModelParams p = ModelParams::reference(r0);
    for (int k : critical_modes(p)) {
      const ModeData md = mode_data(p, k);
      if (md.hypothesis != Hypothesis::H3) continue;
      for (Branch b : {Branch::plus, Branch::minus}) {
        const Transversality tr = transversality(p, k, b);
        CHECK(tr.sign == (b == Branch::plus ? 1 : -1));
        CHECK((tr.closed_form > 0.0) == (tr.sign > 0));
        CHECK((tr.dlambda_dtau.real() > 0.0) == (tr.sign > 0));
        // Closed form equals Re (d lambda / d tau)^{-1}.
        CHECK(std::abs(tr.closed_form - (1.0 / tr.dlambda_dtau).real()) < 1e-8 * std::abs(tr.closed_form));

        const HopfPoint h = critical_delay(p, k, 0, b);
        const double dt = 1e-4;
        const cd start(0.0, h.omega);
        const cd up = track_root(md, start, h.tau, h.tau + dt);
        const cd down = track_root(md, start, h.tau, h.tau - dt);
        const cd fd = (up - down) / (2.0 * dt);
        CHECK(std::abs(fd.real() - tr.dlambda_dtau.real()) < 1e-3 * std::abs(tr.dlambda_dtau.real()));
        CHECK(std::abs(fd.imag() - tr.dlambda_dtau.imag()) < 1e-3 * std::abs(tr.dlambda_dtau));
      }
    }
  }
}

TEST_CASE("stability windows for r0 = 1") {
  const StabilityWindows w = stability_windows(ModelParams::reference(1.0), 45.0);
  const double expected[4][2] = {{0.0, 3.6892}, {10.4124, 16.4128}, {25.4181, 29.1364}, {40.4235, 41.8598}};
  REQUIRE(w.windows.size() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(w.windows[i].start - expected[i][0]) < 1e-3);
    CHECK(std::abs(w.windows[i].end - expected[i][1]) < 1e-3);
  }
  // Count unstable roots by crossing bookkeeping: zero exactly in the windows.
  int unstable = 0;
  double last = 0.0;
  for (const auto& c : w.crossings) {
    unstable += 2 * c.sign;
    CHECK(unstable >= 0);
    const bool window_end = std::any_of(w.windows.begin(), w.windows.end(),
                                        [&](const TauInterval& iv) { return std::abs(iv.end - c.tau) < 1e-12; });
    if (window_end) CHECK(unstable == 2);
    CHECK(c.tau >= last);
    last = c.tau;
  }
}

TEST_CASE("stability windows, other cases") {
  const StabilityWindows w = stability_windows(ModelParams::reference(0.12), 20.0);
  REQUIRE(w.windows.size() == 1);
  CHECK(w.windows[0].start == 0.0);
  CHECK(std::abs(w.windows[0].end - 15.7797) < 1e-3);

  ModelParams h1 = ModelParams::reference(1.0);
  h1.m = 5.0;
  REQUIRE(critical_modes(h1).empty());
  const StabilityWindows all = stability_windows(h1, 30.0);
  REQUIRE(all.windows.size() == 1);
  CHECK(all.windows[0].start == 0.0);
  CHECK(all.windows[0].end == 30.0);

  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 40; ++trial) {
    const ModelParams p = fearbif::testing::random_params(gen);
    const StabilityWindows r = stability_windows(p, 10.0);
    REQUIRE_FALSE(r.windows.empty());
    CHECK(r.windows.front().start == 0.0);
    CHECK(r.windows.front().end > 0.0);
  }
}

TEST_CASE("spectral oracle agrees with the stability windows") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> pick(0.0, 45.0);
  for (double r0 : {1.0, 0.12}) {
    const ModelParams p = ModelParams::reference(r0);
    const StabilityWindows w = stability_windows(p, 45.0);
    int k_max = 1;
    for (int k : w.modes) k_max = std::max(k_max, k + 1);
    int samples = 0;
    while (samples < (r0 == 1.0 ? 10 : 4)) {
      const double tau = pick(gen);
      bool near_edge = false;
      for (const auto& c : w.crossings) near_edge |= std::abs(c.tau - tau) < 0.1;
      if (near_edge) continue;
      ++samples;
      const double abscissa = spectral_abscissa_scan(p, tau, k_max);
      CAPTURE(r0);
      CAPTURE(tau);
      if (inside(w, tau)) {
        CHECK(abscissa <= 1e-6);
      } else {
        CHECK(abscissa > 1e-6);
      }
    }
  }
}

TEST_CASE("Hopf curves and the Hopf-Hopf point") {
  const ModelParams base = ModelParams::reference();
  const HopfCurve plus = hopf_curve(base, 0, 1, Branch::plus, {0.12, 0.3}, 50);
  const HopfCurve minus = hopf_curve(base, 0, 0, Branch::minus, {0.12, 0.3}, 50);
  for (const auto& pt : plus.points) {
    CHECK(std::abs(char_residual(base.with_r0(pt.r0), 0, cd(0.0, pt.omega), pt.tau)) < 1e-10);
  }
  const HopfHopfPoint hh = find_hopf_hopf(plus, minus);
  CHECK(std::abs(hh.r0_star - 0.1606) < 1e-3);
  CHECK(std::abs(hh.tau_star - 42.5794) < 1e-2);
  CHECK(std::abs(hh.omega_plus - 0.1848) < 1e-3);
  CHECK(std::abs(hh.omega_minus - 0.1095) < 1e-3);
  const ModeData md = mode_data(base.with_r0(hh.r0_star), 0);
  CHECK(std::abs(*md.omega_plus - hh.omega_plus) < 1e-12);
  CHECK(std::abs(*md.omega_minus - hh.omega_minus) < 1e-12);
  CHECK_FALSE(hh.resonance_warning);
  CHECK(hh.nearest_resonance > 0.05);

  const HopfHopfPoint swapped = find_hopf_hopf(minus, plus);
  CHECK(swapped.r0_star == doctest::Approx(hh.r0_star).epsilon(1e-12));
  CHECK(swapped.tau_star == doctest::Approx(hh.tau_star).epsilon(1e-12));
}

TEST_CASE("existence interval of mode-0 Hopf points") {
  const auto ex = hopf_existence_interval(ModelParams::reference(), 0, Branch::plus, {0.1, 10.0}, 200);
  REQUIRE(ex);
  CHECK(std::abs(ex->first - 0.115) < 1e-3);
  CHECK(std::abs(ex->second - 8.2716) < 1e-3);
}

TEST_CASE("two crossing frequencies for the first four modes") {
  // Holds from r0 = 0.11943 upward; below it mode 3 has a single frequency.
  for (double r0 = 0.12; r0 < 0.2519; r0 += 0.005) {
    for (int k = 0; k <= 3; ++k) {
      CAPTURE(r0);
      CAPTURE(k);
      CHECK(mode_data(ModelParams::reference(r0), k).hypothesis == Hypothesis::H3);
    }
  }
  CHECK(mode_data(ModelParams::reference(0.117), 3).hypothesis != Hypothesis::H3);
}
