#pragma once

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fearbif/linear_stability.hpp"
#include "fearbif/model.hpp"

namespace fearbif {

/// Eigenvectors at a simple Hopf point (mode n0, frequency omega, delay
/// tau_bar) of the rescaled system: p0 = (1, p1) for i omega tau_bar and
/// q0 = M (1, q2) for the adjoint, normalized so that (q, p) = 1.
struct HopfEigendata {
  int n0 = 0;
  double omega = 0.0;
  double tau_bar = 0.0;
  std::complex<double> p1;
  std::complex<double> q2;
  std::complex<double> M;
  double char_residual = 0.0;          ///< |Delta(i omega tau_bar) p0|
  double normalization_residual = 0.0; ///< |(q, p) - 1|
  double cross_residual = 0.0;         ///< |(q, conj p)|

  [[nodiscard]] Eigen::Vector2cd p0() const { return {1.0, p1}; }
  [[nodiscard]] Eigen::RowVector2cd q0() const { return {M, M * q2}; }
};

/// How the forcing of the second-order center-manifold systems is scaled.
/// `literal` uses the unscaled Taylor vectors with the mode projection,
/// as in the standard closed forms; `delay_scaled` multiplies them by
/// tau_bar, which makes c1(0) agree with a direct resolvent computation in
/// rescaled time.
enum class ForcingScale { literal, delay_scaled };

/// Component of a second-order term living in spatial mode n:
/// E exp(rate * theta) gamma_n.
struct ModeVector {
  int n = 0;
  double projection = 0.0;  ///< integral of gamma_{n0}^2 gamma_n
  Eigen::Vector2cd E = Eigen::Vector2cd::Zero();
};

/// w(theta) = coef_plus p0 e^{i w tau theta} gamma_{n0}
///          + coef_minus conj(p0) e^{-i w tau theta} gamma_{n0}
///          + sum_n E_n e^{rate theta} gamma_n
struct SecondOrderTerm {
  std::complex<double> coef_plus;
  std::complex<double> coef_minus;
  std::complex<double> rate;
  std::vector<ModeVector> modes;
};

struct HopfCoefficients {
  std::complex<double> g20, g11, g02, g21;
  SecondOrderTerm w20, w11;
  ForcingScale scale = ForcingScale::literal;
};

struct HopfClassification {
  std::complex<double> c1_0;
  double mu2 = 0.0;
  double beta2 = 0.0;
  bool supercritical = false;  ///< mu2 > 0
  bool orbit_stable = false;   ///< beta2 < 0
  bool degenerate = false;     ///< |Re c1(0)| < 1e-9
};

/// Everything known about one Hopf point under both forcing conventions.
/// The literal classification divides by the closed-form transversality
/// value; the scaled one divides by the exact derivative of the rescaled
/// eigenvalue tau * lambda, which shares the time unit of its c1(0).
struct HopfReport {
  ModelParams params;
  HopfPoint point;
  HopfEigendata eigendata;
  Transversality transversality;
  HopfCoefficients coefficients;         ///< literal
  HopfClassification classification;     ///< literal, mu2 from the closed form
  HopfCoefficients coefficients_scaled;  ///< delay_scaled
  HopfClassification classification_scaled;
};

[[nodiscard]] HopfEigendata hopf_eigendata(const ModelParams& params, int k, double tau_bar,
                                           double omega);

[[nodiscard]] HopfCoefficients g_coefficients(const HopfEigendata& eig, const LocalModel& lm,
                                              ForcingScale scale = ForcingScale::literal);

/// c1(0) = i/(2 omega tau)(g11 g20 - 2|g11|^2 - |g02|^2/3) + g21/2,
/// mu2 = -Re c1 / re_lambda_prime, beta2 = 2 Re c1.
[[nodiscard]] HopfClassification hopf_classification(const HopfCoefficients& g, double omega_tau,
                                                     double re_lambda_prime);

[[nodiscard]] HopfReport hopf_report(const ModelParams& params, int k, int j, Branch branch);

struct BautinPoint {
  double r0 = 0.0;
  double tau = 0.0;
  double omega = 0.0;
  double re_c1 = 0.0;
  std::pair<double, double> bracket;  ///< r0 values with opposite signs of Re c1
  double re_c1_left = 0.0;
  double re_c1_right = 0.0;
};

/// Re c1(0) along the Hopf curve tau_k^{j, branch}(r0) at fixed other params.
[[nodiscard]] double re_c1_along_curve(const ModelParams& base, int k, int j, Branch branch,
                                       double r0, ForcingScale scale = ForcingScale::literal);

/// Bisection on Re c1(0) along a Hopf curve, starting from the first sign
/// change among n_samples equally spaced r0 values.
[[nodiscard]] BautinPoint find_bautin(const ModelParams& base, int k, int j, Branch branch,
                                      std::pair<double, double> r0_range, int n_samples = 64,
                                      ForcingScale scale = ForcingScale::literal);

}  // namespace fearbif
