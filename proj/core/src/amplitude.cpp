#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "fearbif/error.hpp"
#include "fearbif/hopf_hopf.hpp"

namespace fearbif {

namespace {

using State = std::array<double, 2>;
namespace odeint = boost::numeric::odeint;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Right-hand side of the amplitude system in amplitude time.
struct AmplitudeFlow {
  double nu1, nu2, b0, c0, d0, sign;
  void operator()(const State& x, State& dx, double /*t*/) const {
    const double r1 = x[0] * x[0];
    const double r2 = x[1] * x[1];
    dx[0] = sign * x[0] * (nu1 + r1 + b0 * r2);
    dx[1] = sign * x[1] * (nu2 + c0 * r1 + d0 * r2);
  }
};

Stability classify(const std::array<std::complex<double>, 2>& ev, double scale) {
  const double tol = 1e-12 * std::max(scale, 1e-300);
  const double re0 = ev[0].real();
  const double re1 = ev[1].real();
  if (std::abs(re0) <= tol || std::abs(re1) <= tol) return Stability::nonhyperbolic;
  if (re0 < 0.0 && re1 < 0.0) return Stability::sink;
  if (re0 > 0.0 && re1 > 0.0) return Stability::source;
  return Stability::saddle;
}

std::array<std::complex<double>, 2> eigenvalues(double j00, double j01, double j10, double j11) {
  const double tr = j00 + j11;
  const double det = j00 * j11 - j01 * j10;
  const std::complex<double> root = std::sqrt(std::complex<double>(tr * tr / 4.0 - det));
  return {tr / 2.0 + root, tr / 2.0 - root};
}

Eigen::Vector2d nu_of(const Unfolding& u, double mu1, double mu2) {
  return u.nu_map * Eigen::Vector2d(mu1, mu2);
}

// Line through the origin given by the linear form alpha . nu = 0, expressed
// in (mu1, mu2) as mu1 = slope * mu2.
double slope_of(const Unfolding& u, const Eigen::Vector2d& alpha) {
  const Eigen::RowVector2d n = alpha.transpose() * u.nu_map;
  if (n(0) == 0.0) throw NumericalError("bifurcation line parallel to the mu1 axis");
  return -n(1) / n(0);
}

// Validity of a half-line: which side (mu2 >= 0 or mu2 <= 0) satisfies the
// existence predicate.
template <class Pred>
std::optional<LineValidity> half_line(const Unfolding& u, double slope, Pred holds) {
  const Eigen::Vector2d up = nu_of(u, slope, 1.0);
  const Eigen::Vector2d down = nu_of(u, -slope, -1.0);
  if (holds(up)) return LineValidity::mu2_nonnegative;
  if (holds(down)) return LineValidity::mu2_nonpositive;
  return std::nullopt;
}

struct Mixed {
  double rho1_sq;
  double rho2_sq;
};

Mixed mixed_amplitudes(const Unfolding& u, const Eigen::Vector2d& nu) {
  return {(u.b0 * nu(1) - u.d0 * nu(0)) / u.det, (u.c0 * nu(0) - nu(1)) / u.det};
}

std::string summarize(const std::vector<AmplitudeEquilibrium>& eqs) {
  std::ostringstream os;
  for (std::size_t i = 0; i < eqs.size(); ++i) {
    if (i) os << "; ";
    os << to_string(eqs[i].kind) << ' ' << to_string(eqs[i].stability);
  }
  return os.str();
}

}  // namespace

const char* to_string(AmplitudeKind k) {
  switch (k) {
    case AmplitudeKind::origin: return "origin";
    case AmplitudeKind::pure1: return "pure1";
    case AmplitudeKind::pure2: return "pure2";
    case AmplitudeKind::mixed: return "mixed";
  }
  return "?";
}

const char* to_string(Stability s) {
  switch (s) {
    case Stability::sink: return "sink";
    case Stability::source: return "source";
    case Stability::saddle: return "saddle";
    case Stability::nonhyperbolic: return "nonhyperbolic";
  }
  return "?";
}

std::vector<AmplitudeEquilibrium> amplitude_equilibria(const Unfolding& u, double nu1, double nu2) {
  const double sign = static_cast<double>(u.eps1);
  const double scale = std::max(std::abs(nu1), std::abs(nu2));
  std::vector<AmplitudeEquilibrium> out;

  auto push = [&](AmplitudeKind kind, double r1, double r2) {
    const double s1 = r1 * r1;
    const double s2 = r2 * r2;
    const double j00 = nu1 + 3.0 * s1 + u.b0 * s2;
    const double j01 = 2.0 * u.b0 * r1 * r2;
    const double j10 = 2.0 * u.c0 * r1 * r2;
    const double j11 = nu2 + u.c0 * s1 + 3.0 * u.d0 * s2;
    AmplitudeEquilibrium e;
    e.kind = kind;
    e.rho1 = r1;
    e.rho2 = r2;
    e.eigenvalues = eigenvalues(sign * j00, sign * j01, sign * j10, sign * j11);
    e.stability = classify(e.eigenvalues, scale);
    out.push_back(e);
  };

  push(AmplitudeKind::origin, 0.0, 0.0);
  if (nu1 < 0.0) push(AmplitudeKind::pure1, std::sqrt(-nu1), 0.0);
  if (-nu2 / u.d0 > 0.0) push(AmplitudeKind::pure2, 0.0, std::sqrt(-nu2 / u.d0));
  if (u.det != 0.0) {
    const Mixed mx = mixed_amplitudes(u, Eigen::Vector2d(nu1, nu2));
    if (mx.rho1_sq > 0.0 && mx.rho2_sq > 0.0) {
      push(AmplitudeKind::mixed, std::sqrt(mx.rho1_sq), std::sqrt(mx.rho2_sq));
    }
  }
  return out;
}

AmplitudeTrajectory amplitude_trajectory(const Unfolding& u, double nu1, double nu2,
                                         std::pair<double, double> rho0, double t_end, int n_out) {
  if (!(t_end > 0.0) || n_out < 2) throw ValidationError("amplitude_trajectory: bad horizon");
  const AmplitudeFlow flow{nu1, nu2, u.b0, u.c0, static_cast<double>(u.d0), static_cast<double>(u.eps1)};
  State x{rho0.first, rho0.second};
  std::vector<double> times(static_cast<std::size_t>(n_out));
  for (int i = 0; i < n_out; ++i) times[i] = t_end * i / (n_out - 1);
  AmplitudeTrajectory traj;
  auto stepper = odeint::make_dense_output(1e-12, 1e-9, odeint::runge_kutta_dopri5<State>());
  odeint::integrate_times(stepper, flow, x, times.begin(), times.end(), t_end / (10.0 * n_out),
                          [&](const State& s, double t) {
                            traj.t.push_back(t);
                            traj.rho1.push_back(s[0]);
                            traj.rho2.push_back(s[1]);
                          });
  return traj;
}

std::optional<int> heteroclinic_splitting(const Unfolding& u, double nu1, double nu2) {
  const double d0 = u.d0;
  if (!(nu1 < 0.0) || !(-nu2 / d0 > 0.0) || u.det == 0.0) return std::nullopt;
  const Mixed mx = mixed_amplitudes(u, Eigen::Vector2d(nu1, nu2));
  if (!(mx.rho1_sq > 0.0 && mx.rho2_sq > 0.0)) return std::nullopt;

  const double r1a = std::sqrt(-nu1);       // pure mode 1 at (r1a, 0)
  const double r2b = std::sqrt(-nu2 / d0);  // pure mode 2 at (0, r2b)
  const double interior1 = nu2 + u.c0 * r1a * r1a;
  const double interior2 = nu1 + u.b0 * r2b * r2b;

  State start;
  State target;
  int axis;  // component along which the target saddle sits
  if (interior2 > 0.0 && interior1 < 0.0) {
    start = {1e-6 * r2b, r2b};
    target = {r1a, 0.0};
    axis = 0;
  } else if (interior1 > 0.0 && interior2 < 0.0) {
    start = {r1a, 1e-6 * r1a};
    target = {0.0, r2b};
    axis = 1;
  } else {
    return std::nullopt;
  }

  const State em{std::sqrt(mx.rho1_sq), std::sqrt(mx.rho2_sq)};
  const double sx = target[0] - em[0];
  const double sy = target[1] - em[1];
  auto side = [&](const State& x) { return sx * (x[1] - em[1]) - sy * (x[0] - em[0]); };
  auto along = [&](const State& x) {
    return ((x[0] - em[0]) * sx + (x[1] - em[1]) * sy) / (sx * sx + sy * sy);
  };

  const double scale = std::max(std::abs(nu1), std::abs(nu2));
  const AmplitudeFlow flow{nu1, nu2, u.b0, u.c0, d0, 1.0};
  auto stepper = odeint::make_dense_output(1e-13, 1e-10, odeint::runge_kutta_dopri5<State>());
  stepper.initialize(start, 0.0, 1e-3 / scale);
  const double t_max = 400.0 / scale;
  State prev = start;
  double prev_side = side(prev);
  while (stepper.current_time() < t_max) {
    stepper.do_step(flow);
    const State x = stepper.current_state();
    if (x[axis] > 1.5 * target[axis] || std::hypot(x[0], x[1]) > 10.0 * std::max(r1a, r2b)) return 1;
    const double s = side(x);
    if ((s < 0.0) != (prev_side < 0.0)) {
      const double w = prev_side / (prev_side - s);
      const State hit{prev[0] + w * (x[0] - prev[0]), prev[1] + w * (x[1] - prev[1])};
      const double t = along(hit);
      if (t >= 0.0 && t <= 1.0) return -1;
    }
    prev = x;
    prev_side = s;
  }
  return std::nullopt;
}

std::optional<std::pair<double, double>> locate_heteroclinic(const Unfolding& u) {
  constexpr int kSamples = 720;
  auto split_at = [&](double phi) { return heteroclinic_splitting(u, std::cos(phi), std::sin(phi)); };
  std::vector<std::optional<int>> s(kSamples + 1);
  for (int i = 0; i <= kSamples; ++i) s[i] = split_at(kTwoPi * i / kSamples);

  for (int i = 0; i < kSamples; ++i) {
    if (!s[i] || !s[i + 1] || *s[i] == *s[i + 1]) continue;
    double a = kTwoPi * i / kSamples;
    double b = kTwoPi * (i + 1) / kSamples;
    const int sa = *s[i];
    for (int it = 0; it < 60 && b - a > 1e-14; ++it) {
      const double mid = 0.5 * (a + b);
      const auto sm = split_at(mid);
      if (!sm) break;
      (*sm == sa ? a : b) = mid;
    }
    const double phi = 0.5 * (a + b);
    const Eigen::Vector2d mu = u.nu_map.inverse() * Eigen::Vector2d(std::cos(phi), std::sin(phi));
    return std::make_pair(mu(0), mu(1));
  }
  return std::nullopt;
}

std::string amplitude_attractor(const Unfolding& u, double mu1, double mu2) {
  const Eigen::Vector2d nu = nu_of(u, mu1, mu2);
  std::set<std::string> kinds;
  for (const AmplitudeEquilibrium& e : amplitude_equilibria(u, nu(0), nu(1))) {
    if (e.stability != Stability::sink) continue;
    switch (e.kind) {
      case AmplitudeKind::origin: kinds.insert("equilibrium"); break;
      case AmplitudeKind::pure1:
      case AmplitudeKind::pure2: kinds.insert("periodic"); break;
      case AmplitudeKind::mixed: kinds.insert("torus"); break;
    }
  }
  if (kinds.empty()) return "other";
  std::string out;
  for (const auto& k : kinds) out += (out.empty() ? "" : "+") + k;
  return out;
}

BifurcationSet bifurcation_lines(const Unfolding& u, bool locate_l4) {
  BifurcationSet set;
  const double d0 = u.d0;
  set.lines.push_back({"l1", "nu2 = 0: Hopf bifurcation of the second pure mode",
                       slope_of(u, {0.0, 1.0}), LineValidity::full});
  set.lines.push_back({"l2", "nu1 = 0: Hopf bifurcation of the first pure mode",
                       slope_of(u, {1.0, 0.0}), LineValidity::full});

  auto mixed_exists = [&](const Eigen::Vector2d& nu) {
    const Mixed mx = mixed_amplitudes(u, nu);
    return mx.rho1_sq > 0.0 && mx.rho2_sq > 0.0;
  };

  const double s3 = slope_of(u, {u.c0, -1.0});
  if (auto v = half_line(u, s3, [](const Eigen::Vector2d& nu) { return nu(0) < 0.0; })) {
    set.lines.push_back({"l3", "c0 nu1 = nu2: mixed mode branches from the first pure mode", s3, *v});
  }
  if (d0 < 0.0 && u.det > 0.0) {
    const double s5 = slope_of(u, {-(u.c0 - 1.0), u.b0 + 1.0});
    if (auto v = half_line(u, s5, mixed_exists)) {
      set.lines.push_back({"l5", "Hopf bifurcation of the mixed mode (invariant torus)", s5, *v});
    }
  }
  const double s6 = slope_of(u, {-d0, u.b0});
  if (auto v = half_line(u, s6, [&](const Eigen::Vector2d& nu) { return -nu(1) / d0 > 0.0; })) {
    set.lines.push_back({"l6", "b0 nu2 = d0 nu1: mixed mode branches from the second pure mode", s6, *v});
  }

  if (locate_l4 && d0 < 0.0 && u.det > 0.0) {
    if (auto dir = locate_heteroclinic(u)) {
      const auto [m1, m2] = *dir;
      const LineValidity v = m2 >= 0.0 ? LineValidity::mu2_nonnegative : LineValidity::mu2_nonpositive;
      set.l4 = BifurcationLine{"l4", "heteroclinic connection between the pure-mode saddles", m1 / m2, v};
      for (int i = 1; i <= 5; ++i) {
        const double mu2 = (m2 >= 0.0 ? 1.0 : -1.0) * 0.002 * i;
        set.l4_samples.emplace_back(mu2 * m1 / m2, mu2);
      }
    }
  }

  // Rays of every line, sorted by polar angle in the (mu1, mu2) plane.
  struct Ray {
    double angle;
    std::string name;
  };
  std::vector<Ray> rays;
  auto add_rays = [&](const BifurcationLine& line) {
    const double up = std::atan2(1.0, line.slope);
    const double down = std::atan2(-1.0, -line.slope);
    auto wrap = [](double a) { return a < 0.0 ? a + kTwoPi : a; };
    if (line.validity != LineValidity::mu2_nonpositive) rays.push_back({wrap(up), line.name});
    if (line.validity != LineValidity::mu2_nonnegative) rays.push_back({wrap(down), line.name});
  };
  for (const auto& line : set.lines) add_rays(line);
  if (set.l4) add_rays(*set.l4);
  std::sort(rays.begin(), rays.end(), [](const Ray& a, const Ray& b) { return a.angle < b.angle; });
  // In the truncated system l4 coincides with l5; coincident rays bound no sector.
  std::vector<Ray> merged;
  for (const Ray& r : rays) {
    if (!merged.empty() && r.angle - merged.back().angle < 1e-9) {
      merged.back().name += "/" + r.name;
    } else {
      merged.push_back(r);
    }
  }
  if (merged.size() > 1 && merged.front().angle + kTwoPi - merged.back().angle < 1e-9) {
    merged.front().name += "/" + merged.back().name;
    merged.pop_back();
  }
  rays = std::move(merged);

  const std::size_t n = rays.size();
  std::vector<Region> sectors(n);
  int sink = -1;
  for (std::size_t i = 0; i < n; ++i) {
    const double from = rays[i].angle;
    const double to = i + 1 < n ? rays[i + 1].angle : rays[0].angle + kTwoPi;
    const double mid = 0.5 * (from + to);
    const Eigen::Vector2d nu = nu_of(u, std::cos(mid), std::sin(mid));
    const auto eqs = amplitude_equilibria(u, nu(0), nu(1));
    sectors[i] = {"", from, std::fmod(to, kTwoPi), summarize(eqs)};
    const bool origin_sink = eqs.front().stability == Stability::sink;
    const bool touches_l2 = rays[i].name == "l2" || rays[(i + 1) % n].name == "l2";
    if (origin_sink && (sink < 0 || touches_l2)) sink = static_cast<int>(i);
  }

  // D2 is the stable-origin sector; numbering continues across l2 into D3.
  if (sink >= 0) {
    const int step = rays[(sink + 1) % n].name == "l2" ? 1 : -1;
    for (std::size_t j = 0; j < n; ++j) {
      const auto idx = static_cast<std::size_t>(((sink + step * static_cast<int>(j)) % static_cast<int>(n) + n) % n);
      sectors[idx].label = "D" + std::to_string((j + 1) % n + 1);
    }
  }
  set.regions = std::move(sectors);
  return set;
}

}  // namespace fearbif
