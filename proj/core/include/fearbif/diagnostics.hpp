#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fearbif/simulator.hpp"

namespace fearbif {

struct PoincarePoint {
  double t = 0.0;
  double u = 0.0;  ///< u(0, t)
  double v = 0.0;  ///< v(0, t)
  double lag_residual = 0.0;  ///< u(0, t - tau) - u* on the interpolated series
};

/// Upward crossings of u(0, t - tau) through u*.
struct PoincareSet {
  double u_star = 0.0;
  double tau = 0.0;
  std::vector<PoincarePoint> points;
  std::vector<std::string> warnings;
};

/// Section of the series (t, u, v) recorded at x = 0. The first
/// discard_fraction of the time span is skipped, and crossing times are
/// located exactly on the piecewise-linear interpolant.
[[nodiscard]] PoincareSet poincare_section(const std::vector<double>& t, const std::vector<double>& u,
                                           const std::vector<double>& v, double u_star, double tau,
                                           double discard_fraction = 0.5);
[[nodiscard]] PoincareSet poincare_section(const Field& field, double discard_fraction = 0.5);

/// Dominant period of a roughly uniformly sampled series from the first
/// autocorrelation maximum after its first zero, refined by a parabola.
/// Returns nullopt when that maximum is below 0.5.
[[nodiscard]] std::optional<double> estimate_period(const std::vector<double>& t, const std::vector<double>& y);

enum class AttractorClass { fixed_point, periodic, torus, chaotic, undecided };
[[nodiscard]] const char* to_string(AttractorClass c);

/// Exponential separation rate of twin trajectories.
struct DivergenceEstimate {
  double rate = 0.0;    ///< mean fitted rate over seeds
  double spread = 0.0;  ///< standard deviation over seeds, or the fit's standard error for one seed
  std::vector<double> rates;
};

struct AttractorEvidence {
  double late_variance = 0.0;
  std::optional<double> period;
  std::size_t section_points = 0;
  std::size_t clusters = 0;
  double max_cluster_diameter = 0.0;
  double scale = 0.0;
  bool closed_curve = false;
  double gap_ratio = 0.0;  ///< largest over median gap along the closed tour
  std::optional<DivergenceEstimate> divergence;
  std::string note;
};

struct AttractorVerdict {
  AttractorClass cls = AttractorClass::undecided;
  AttractorEvidence evidence;
};

struct ClassifyOptions {
  double discard_fraction = 0.5;
  bool divergence = true;  ///< run twin trajectories when the section is neither periodic nor a torus
  int seeds = 1;
  std::uint64_t seed = 1;
  double perturbation = 1e-8;
};

/// Twin-trajectory divergence for a field that carries a checkpoint. Each
/// seed picks a direction in the (u, v) plane for a homogeneous
/// perturbation of the given size; twins run concurrently.
[[nodiscard]] DivergenceEstimate divergence_rate(const Field& field, const ClassifyOptions& options);

/// Single-linkage clusters of section points with linkage distance eps.
[[nodiscard]] std::vector<std::vector<std::size_t>> cluster_points(const std::vector<PoincarePoint>& pts,
                                                                   double eps);

/// True when the points admit a closed tour in which every point's nearest
/// neighbour is adjacent and no gap exceeds 20 times the median gap.
[[nodiscard]] bool is_closed_curve(const std::vector<PoincarePoint>& pts, double* gap_ratio = nullptr);

[[nodiscard]] AttractorVerdict classify_attractor(const Field& field, const ClassifyOptions& options = {});

struct CoexistenceResult {
  AttractorVerdict a;
  AttractorVerdict b;
  bool bistable = false;
};

/// Runs the two histories concurrently at (tau, r0) and classifies both.
[[nodiscard]] CoexistenceResult coexistence_probe(const ModelParams& params, double tau, double r0,
                                                  std::pair<HistoryFn, HistoryFn> history_a,
                                                  std::pair<HistoryFn, HistoryFn> history_b,
                                                  SimulationOptions sim = {}, const ClassifyOptions& cls = {});

}  // namespace fearbif
