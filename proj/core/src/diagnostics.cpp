#include "fearbif/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "fearbif/error.hpp"
#include "fearbif/parallel.hpp"

namespace fearbif {

namespace {

// Piecewise-linear interpolation of (t, y) at s, clamped to the ends.
double interp(const std::vector<double>& t, const std::vector<double>& y, double s) {
  if (s <= t.front()) return y.front();
  if (s >= t.back()) return y.back();
  const auto it = std::upper_bound(t.begin(), t.end(), s);
  const auto i = static_cast<std::size_t>(it - t.begin());
  const double w = (s - t[i - 1]) / (t[i] - t[i - 1]);
  return y[i - 1] + w * (y[i] - y[i - 1]);
}

std::size_t first_index_at(const std::vector<double>& t, double s) {
  return static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), s) - t.begin());
}

double range_of(const std::vector<double>& y, std::size_t from) {
  if (from >= y.size()) return 0.0;
  const auto [lo, hi] = std::minmax_element(y.begin() + static_cast<std::ptrdiff_t>(from), y.end());
  return *hi - *lo;
}

double variance_of(const std::vector<double>& y, std::size_t from) {
  const std::size_t n = y.size() - std::min(from, y.size());
  if (n < 2) return 0.0;
  double mean = 0.0;
  for (std::size_t i = from; i < y.size(); ++i) mean += y[i];
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (std::size_t i = from; i < y.size(); ++i) var += (y[i] - mean) * (y[i] - mean);
  return var / static_cast<double>(n);
}

struct LineFit {
  double slope = 0.0;
  double stderr_slope = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - my - f.slope * (x[i] - mx);
    ssr += r * r;
  }
  f.stderr_slope = x.size() > 2 ? std::sqrt(ssr / (n - 2.0) / sxx) : 0.0;
  return f;
}

// Section coordinates scaled to comparable ranges.
std::vector<std::array<double, 2>> normalized(const std::vector<PoincarePoint>& pts) {
  double ulo = pts[0].u, uhi = pts[0].u, vlo = pts[0].v, vhi = pts[0].v;
  for (const auto& p : pts) {
    ulo = std::min(ulo, p.u);
    uhi = std::max(uhi, p.u);
    vlo = std::min(vlo, p.v);
    vhi = std::max(vhi, p.v);
  }
  const double su = uhi > ulo ? uhi - ulo : 1.0;
  const double sv = vhi > vlo ? vhi - vlo : 1.0;
  std::vector<std::array<double, 2>> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back({(p.u - ulo) / su, (p.v - vlo) / sv});
  return out;
}

double dist(const std::array<double, 2>& a, const std::array<double, 2>& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

bool tour_is_curve(const std::vector<std::array<double, 2>>& q, const std::vector<std::size_t>& order,
                   double& ratio) {
  const std::size_t n = order.size();
  std::vector<std::size_t> pos(n);
  for (std::size_t i = 0; i < n; ++i) pos[order[i]] = i;

  std::vector<double> gaps(n);
  for (std::size_t i = 0; i < n; ++i) gaps[i] = dist(q[order[i]], q[order[(i + 1) % n]]);
  std::vector<double> sorted = gaps;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n / 2), sorted.end());
  const double median = sorted[n / 2];
  const double largest = *std::max_element(gaps.begin(), gaps.end());
  ratio = median > 0.0 ? largest / median : std::numeric_limits<double>::infinity();
  if (!(ratio <= 20.0)) return false;

  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) best = std::min(best, dist(q[i], q[j]));
    }
    const std::size_t prev = order[(pos[i] + n - 1) % n];
    const std::size_t next = order[(pos[i] + 1) % n];
    const double adjacent = std::min(dist(q[i], q[prev]), dist(q[i], q[next]));
    if (adjacent > best * (1.0 + 1e-12)) return false;
  }
  return true;
}

}  // namespace

const char* to_string(AttractorClass c) {
  switch (c) {
    case AttractorClass::fixed_point: return "fixed_point";
    case AttractorClass::periodic: return "periodic";
    case AttractorClass::torus: return "torus";
    case AttractorClass::chaotic: return "chaotic";
    case AttractorClass::undecided: return "undecided";
  }
  return "?";
}

PoincareSet poincare_section(const std::vector<double>& t, const std::vector<double>& u,
                             const std::vector<double>& v, double u_star, double tau, double discard_fraction) {
  if (t.size() != u.size() || t.size() != v.size()) throw ValidationError("poincare_section: series lengths differ");
  PoincareSet set;
  set.u_star = u_star;
  set.tau = tau;
  if (t.size() < 2) {
    set.warnings.push_back("series too short for a section");
    return set;
  }
  const double span = t.back() - t.front();
  if (span < 10.0 * tau) set.warnings.push_back("series shorter than ten delay intervals");

  const double begin = std::max(t.front() + discard_fraction * span, t.front() + tau);
  const double floor = 1e-9 * std::max(1.0, std::abs(u_star));
  auto g = [&](double s) { return interp(t, u, s - tau) - u_star; };

  bool armed = false;
  std::size_t i0 = first_index_at(t, begin);
  double g_prev = i0 < t.size() ? g(t[i0]) : 0.0;
  for (std::size_t i = i0 + 1; i < t.size(); ++i) {
    const double gi = g(t[i]);
    if (g_prev < -floor) armed = true;
    if (armed && g_prev < 0.0 && gi >= 0.0) {
      // g is piecewise linear between t[i-1] and t[i]; bisect to the exact root.
      double a = t[i - 1], b = t[i];
      for (int it = 0; it < 80 && b - a > 0.0; ++it) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        (g(m) < 0.0 ? a : b) = m;
      }
      const double ga = g(a), gb = g(b);
      const double tc = gb - ga != 0.0 ? a - ga * (b - a) / (gb - ga) : b;
      set.points.push_back({tc, interp(t, u, tc), interp(t, v, tc), g(tc)});
      armed = false;
    }
    g_prev = gi;
  }
  if (set.points.empty()) set.warnings.push_back("empty section: no upward crossings after the transient");
  return set;
}

PoincareSet poincare_section(const Field& field, double discard_fraction) {
  const auto eq = positive_equilibrium(field.params);
  if (!eq) throw ValidationError("poincare_section: no positive equilibrium at these parameters");
  return poincare_section(field.t, field.u_left, field.v_left, eq->u_star, field.params.tau, discard_fraction);
}

std::optional<double> estimate_period(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size() || t.size() < 8) return std::nullopt;
  const std::size_t stride = (t.size() + 4095) / 4096;
  std::vector<double> ts, ys;
  for (std::size_t i = 0; i < t.size(); i += stride) {
    ts.push_back(t[i]);
    ys.push_back(y[i]);
  }
  const std::size_t n = ys.size();
  const double step = (ts.back() - ts.front()) / static_cast<double>(n - 1);

  // Remove the linear trend.
  const LineFit trend = fit_line(ts, ys);
  const double mt = std::accumulate(ts.begin(), ts.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] -= my + trend.slope * (ts[i] - mt);

  double c0 = 0.0;
  for (double e : ys) c0 += e * e;
  c0 /= static_cast<double>(n);
  if (!(c0 > 0.0)) return std::nullopt;

  const std::size_t max_lag = n / 2;
  std::vector<double> r(max_lag + 1);
  for (std::size_t k = 0; k <= max_lag; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) s += ys[i] * ys[i + k];
    r[k] = s / static_cast<double>(n - k) / c0;
  }

  std::size_t k = 1;
  while (k <= max_lag && r[k] >= 0.0) ++k;
  for (; k + 1 <= max_lag; ++k) {
    if (r[k] > r[k - 1] && r[k] >= r[k + 1]) break;
  }
  if (k + 1 > max_lag || r[k] < 0.5) return std::nullopt;
  const double denom = r[k - 1] - 2.0 * r[k] + r[k + 1];
  const double offset = denom != 0.0 ? 0.5 * (r[k - 1] - r[k + 1]) / denom : 0.0;
  return (static_cast<double>(k) + offset) * step;
}

std::vector<std::vector<std::size_t>> cluster_points(const std::vector<PoincarePoint>& pts, double eps) {
  const std::size_t n = pts.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::hypot(pts[i].u - pts[j].u, pts[i].v - pts[j].v) <= eps) parent[find(i)] = find(j);
    }
  }
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<std::ptrdiff_t> slot(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<std::ptrdiff_t>(clusters.size());
      clusters.emplace_back();
    }
    clusters[static_cast<std::size_t>(slot[root])].push_back(i);
  }
  return clusters;
}

bool is_closed_curve(const std::vector<PoincarePoint>& pts, double* gap_ratio) {
  const std::size_t n = pts.size();
  if (n < 3) return false;
  const auto q = normalized(pts);

  // Tour 1: polar angle around the centroid.
  double cx = 0.0, cy = 0.0;
  for (const auto& p : q) {
    cx += p[0];
    cy += p[1];
  }
  cx /= static_cast<double>(n);
  cy /= static_cast<double>(n);
  std::vector<std::size_t> angular(n);
  std::iota(angular.begin(), angular.end(), std::size_t{0});
  std::sort(angular.begin(), angular.end(), [&](std::size_t a, std::size_t b) {
    return std::atan2(q[a][1] - cy, q[a][0] - cx) < std::atan2(q[b][1] - cy, q[b][0] - cx);
  });

  // Tour 2: greedy nearest neighbour from the first point.
  std::vector<std::size_t> greedy{0};
  std::vector<bool> used(n, false);
  used[0] = true;
  for (std::size_t step = 1; step < n; ++step) {
    const std::size_t cur = greedy.back();
    std::size_t best = n;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j]) continue;
      const double d = dist(q[cur], q[j]);
      if (d < bd) {
        bd = d;
        best = j;
      }
    }
    used[best] = true;
    greedy.push_back(best);
  }

  double r1 = 0.0, r2 = 0.0;
  const bool ok1 = tour_is_curve(q, angular, r1);
  const bool ok2 = tour_is_curve(q, greedy, r2);
  if (gap_ratio) *gap_ratio = ok1 ? r1 : ok2 ? r2 : std::min(r1, r2);
  return ok1 || ok2;
}

DivergenceEstimate divergence_rate(const Field& field, const ClassifyOptions& options) {
  if (!field.checkpoint) throw ValidationError("divergence_rate: field has no checkpoint");
  const int seeds = std::max(1, options.seeds);
  const Checkpoint& cp = *field.checkpoint;

  SimulationOptions sim;
  sim.grid = field.grid;
  sim.record_stride = 1;
  if (field.t.size() > 1) {
    sim.record_stride = std::max(1, static_cast<int>(std::lround((field.t[1] - field.t[0]) / field.grid.dt)));
  }
  sim.max_snapshots = 0;

  const std::size_t from = first_index_at(field.t, cp.t);
  const double scale = std::max({range_of(field.u_left, from), range_of(field.v_left, from), 1e-12});
  // On a fixed point the attractor has no extent, so saturation is measured
  // against the initial separation instead.
  const double saturation = std::max(1e-2 * scale, 1e3 * options.perturbation);

  std::vector<double> rates(static_cast<std::size_t>(seeds));
  std::vector<double> errors(static_cast<std::size_t>(seeds));
  parallel_for(static_cast<std::size_t>(seeds), [&](std::size_t s) {
    std::mt19937_64 gen(options.seed + s);
    const double angle = static_cast<double>(gen() >> 11) * 0x1.0p-53 * 2.0 * std::numbers::pi;
    const Field twin = resume(field.params,
                              perturbed(cp, options.perturbation * std::cos(angle), options.perturbation * std::sin(angle)),
                              sim);
    std::vector<double> ts, logs;
    for (std::size_t i = 0; i < twin.t.size(); ++i) {
      const double du = twin.u_left[i] - interp(field.t, field.u_left, twin.t[i]);
      const double dv = twin.v_left[i] - interp(field.t, field.v_left, twin.t[i]);
      const double d = std::hypot(du, dv);
      if (d > saturation) break;
      if (d > 0.0) {
        ts.push_back(twin.t[i]);
        logs.push_back(std::log(d));
      }
    }
    if (ts.size() < 3) {
      rates[s] = 0.0;
      errors[s] = std::numeric_limits<double>::infinity();
      return;
    }
    const LineFit fit = fit_line(ts, logs);
    rates[s] = fit.slope;
    errors[s] = fit.stderr_slope;
  });

  DivergenceEstimate est;
  est.rates = rates;
  est.rate = std::accumulate(rates.begin(), rates.end(), 0.0) / seeds;
  if (seeds == 1) {
    est.spread = errors[0];
  } else {
    double var = 0.0;
    for (double r : rates) var += (r - est.rate) * (r - est.rate);
    est.spread = std::sqrt(var / (seeds - 1));
  }
  return est;
}

AttractorVerdict classify_attractor(const Field& field, const ClassifyOptions& options) {
  AttractorVerdict out;
  AttractorEvidence& ev = out.evidence;
  if (field.t.size() < 8) {
    ev.note = "series too short";
    return out;
  }
  const double span = field.t.back() - field.t.front();
  const std::size_t late = first_index_at(field.t, field.t.front() + 0.75 * span);
  ev.late_variance = std::max(variance_of(field.u_left, late), variance_of(field.v_left, late));
  if (ev.late_variance < 1e-10) {
    out.cls = AttractorClass::fixed_point;
    return out;
  }

  const std::size_t kept = first_index_at(field.t, field.t.front() + options.discard_fraction * span);
  const std::vector<double> t_late(field.t.begin() + static_cast<std::ptrdiff_t>(kept), field.t.end());
  const std::vector<double> u_late(field.u_left.begin() + static_cast<std::ptrdiff_t>(kept), field.u_left.end());
  ev.period = estimate_period(t_late, u_late);
  ev.scale = std::max(range_of(field.u_left, kept), range_of(field.v_left, kept));

  const PoincareSet section = poincare_section(field, options.discard_fraction);
  ev.section_points = section.points.size();
  if (ev.section_points < 40) {
    ev.note = "fewer than 40 section crossings";
    return out;
  }

  const double eps = 1e-3 * ev.scale;
  const auto clusters = cluster_points(section.points, eps);
  ev.clusters = clusters.size();
  for (const auto& c : clusters) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      for (std::size_t j = i + 1; j < c.size(); ++j) {
        const auto& a = section.points[c[i]];
        const auto& b = section.points[c[j]];
        ev.max_cluster_diameter = std::max(ev.max_cluster_diameter, std::hypot(a.u - b.u, a.v - b.v));
      }
    }
  }
  if (ev.clusters <= 3 && ev.max_cluster_diameter < eps) {
    out.cls = AttractorClass::periodic;
    return out;
  }

  ev.closed_curve = ev.section_points >= 50 && is_closed_curve(section.points, &ev.gap_ratio);
  if (ev.closed_curve) {
    out.cls = AttractorClass::torus;
    return out;
  }

  if (!options.divergence) {
    ev.note = "section neither periodic nor a closed curve; divergence not requested";
    return out;
  }
  if (!field.checkpoint) {
    ev.note = "section neither periodic nor a closed curve; no checkpoint for twin runs";
    return out;
  }
  ev.divergence = divergence_rate(field, options);
  if (ev.divergence->rate > 0.0 && ev.divergence->rate > 3.0 * ev.divergence->spread) {
    out.cls = AttractorClass::chaotic;
  } else {
    ev.note = "scattered section without a resolved positive divergence rate";
  }
  return out;
}

CoexistenceResult coexistence_probe(const ModelParams& params, double tau, double r0,
                                    std::pair<HistoryFn, HistoryFn> history_a,
                                    std::pair<HistoryFn, HistoryFn> history_b, SimulationOptions sim,
                                    const ClassifyOptions& cls) {
  const ModelParams q = params.with_tau(tau).with_r0(r0);
  sim.grid = resolve_grid(q, sim.grid);
  if (sim.checkpoint_time < 0.0) sim.checkpoint_time = cls.discard_fraction * sim.grid.T;

  const std::pair<HistoryFn, HistoryFn>* hist[2] = {&history_a, &history_b};
  std::vector<AttractorVerdict> verdicts(2);
  parallel_for(2, [&](std::size_t i) {
    const Field f = simulate(q, hist[i]->first, hist[i]->second, sim);
    verdicts[i] = classify_attractor(f, cls);
  });
  CoexistenceResult res{verdicts[0], verdicts[1], verdicts[0].cls != verdicts[1].cls};
  return res;
}

}  // namespace fearbif
