#pragma once

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "fearbif/model.hpp"

namespace fearbif {

/// Number of positive roots omega^2 of the frequency quartic:
/// H1 none, H2 one, H3 two.
enum class Hypothesis { H1, H2, H3 };

/// Crossing branch: `plus` belongs to omega_plus (roots enter the right
/// half plane), `minus` to omega_minus (roots leave it).
enum class Branch { plus, minus };

[[nodiscard]] const char* to_string(Hypothesis h);
[[nodiscard]] const char* to_string(Branch b);

/// Characteristic data of spatial mode k for
///   lambda^2 + A lambda + B + (-b11 lambda + C) exp(-lambda tau) = 0.
struct ModeData {
  int k = 0;
  double kk = 0.0;  ///< k^2 / l^2
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double b11 = 0.0;
  double d1 = 0.0;
  double s = 0.0;     ///< A^2 - 2B - b11^2, the omega^2 coefficient of the quartic
  double disc = 0.0;  ///< s^2 - 4 (B^2 - C^2)
  Hypothesis hypothesis = Hypothesis::H1;
  bool boundary_tie = false;  ///< some hypothesis inequality held with equality
  std::optional<double> omega_plus;
  std::optional<double> omega_minus;

  [[nodiscard]] std::optional<double> omega(Branch b) const {
    return b == Branch::plus ? omega_plus : omega_minus;
  }
  /// Right-hand sides of sin(omega tau) = S and cos(omega tau) = Ck at a root.
  [[nodiscard]] double S(double omega) const;
  [[nodiscard]] double Ck(double omega) const;
  /// Relative residual of omega^4 + s omega^2 + B^2 - C^2.
  [[nodiscard]] double quartic_residual(double omega) const;
};

struct DelayLadder {
  int k = 0;
  Branch branch = Branch::plus;
  double omega = 0.0;
  std::vector<double> tau;  ///< tau_k^{j, branch}, j = 0..j_max
};

/// A purely imaginary root pair +-i omega at delay tau in mode k.
struct HopfPoint {
  int k = 0;
  int j = 0;
  Branch branch = Branch::plus;
  double tau = 0.0;
  double omega = 0.0;
};

struct Transversality {
  int sign = 0;             ///< +1 on the plus branch, -1 on the minus branch
  double closed_form = 0.0; ///< +-sqrt(disc)/(C^2 + b11^2 omega^2) = Re (d lambda/d tau)^{-1}
  std::complex<double> dlambda_dtau;  ///< exact derivative at tau_k^{j, branch}
};

struct HopfCrossing {
  double tau = 0.0;
  int k = 0;
  int j = 0;
  Branch branch = Branch::plus;
  int sign = 0;
};

struct TauInterval {
  double start = 0.0;
  double end = 0.0;
};

struct StabilityWindows {
  double tau_max = 0.0;
  std::vector<TauInterval> windows;
  std::vector<HopfCrossing> crossings;
  std::vector<int> modes;  ///< wavenumbers in D1 u D2 that were scanned
};

struct CurvePoint {
  double r0 = 0.0;
  double tau = 0.0;
  double omega = 0.0;
};

/// tau_k^{j, branch} sampled as a function of r0 with the other parameters
/// fixed at `base`.
struct HopfCurve {
  ModelParams base;
  int k = 0;
  int j = 0;
  Branch branch = Branch::plus;
  std::vector<CurvePoint> points;
  std::vector<double> skipped;  ///< r0 samples where the branch does not exist
};

struct HopfHopfPoint {
  double r0_star = 0.0;
  double tau_star = 0.0;
  int k1 = 0, j1 = 0;  ///< plus branch
  int k2 = 0, j2 = 0;  ///< minus branch
  double omega_plus = 0.0;
  double omega_minus = 0.0;
  double mismatch = 0.0;  ///< |tau_plus - tau_minus| at r0_star
  double nearest_resonance = 0.0;  ///< distance of omega+/omega- to 1, 2, 3, 1/2, 1/3, 2/3, 3/2
  bool resonance_warning = false;
};

[[nodiscard]] ModeData mode_data(const ModelParams& params, int k);

/// lambda^2 + A lambda + B + (-b11 lambda + C) exp(-lambda tau).
[[nodiscard]] std::complex<double> char_residual(const ModelParams& params, int k,
                                                 std::complex<double> lambda, double tau);
[[nodiscard]] std::complex<double> char_residual(const ModeData& md, std::complex<double> lambda,
                                                 double tau);

/// Delays (pi - asin S + 2 j pi)/omega for j = 0..j_max, each verified
/// against both trigonometric conditions.
[[nodiscard]] DelayLadder delay_ladder(const ModelParams& params, int k, Branch branch, int j_max);

[[nodiscard]] HopfPoint critical_delay(const ModelParams& params, int k, int j, Branch branch);

[[nodiscard]] Transversality transversality(const ModelParams& params, int k, Branch branch,
                                            int j = 0);
[[nodiscard]] inline int transversality_sign(const ModelParams& params, int k, Branch branch) {
  return transversality(params, k, branch).sign;
}

/// Wavenumbers admitting purely imaginary roots (H2 or H3), found by an
/// upward scan with a monotone-trend cutoff.
[[nodiscard]] std::vector<int> critical_modes(const ModelParams& params);

[[nodiscard]] StabilityWindows stability_windows(const ModelParams& params, double tau_max);

[[nodiscard]] HopfCurve hopf_curve(const ModelParams& base, int k, int j, Branch branch,
                                   std::pair<double, double> r0_range, int n_samples = 400);

/// Bisection on the delay difference of a plus and a minus curve.
[[nodiscard]] HopfHopfPoint find_hopf_hopf(const HopfCurve& a, const HopfCurve& b);

/// Range of r0 in which mode k admits the given branch, with both ends
/// refined by bisection; nullopt if it exists nowhere in the sampled range.
[[nodiscard]] std::optional<std::pair<double, double>> hopf_existence_interval(
    const ModelParams& base, int k, Branch branch, std::pair<double, double> r0_range,
    int n_samples = 400);

}  // namespace fearbif
