#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fearbif/linear_stability.hpp"
#include "fearbif/model.hpp"

namespace fearbif {

/// Eigendata at a Hopf-Hopf point in rescaled time: p1 = (1, p12) and
/// p3 = (1, p32) for i omega_plus tau* (mode k1) and i omega_minus tau*
/// (mode k2), adjoint vectors q1 = D1 (1, q12), q3 = D3 (1, q32).
struct HHEigendata {
  double r0_star = 0.0;
  double tau_star = 0.0;
  double omega_plus = 0.0;
  double omega_minus = 0.0;
  int k1 = 0;
  int k2 = 0;
  std::complex<double> p12, p32, q12, q32, D1, D3;
  double char_residual_1 = 0.0;
  double char_residual_3 = 0.0;
  double normalization_residual_1 = 0.0;  ///< |(q1, p1) - 1|
  double normalization_residual_3 = 0.0;  ///< |(q3, p3) - 1|
  double cross_residual = 0.0;            ///< max of |(q1, p3)|, |(q1, conj p1)|, |(q3, p1)|, |(q3, conj p3)|

  [[nodiscard]] Eigen::Vector2cd p1() const { return {1.0, p12}; }
  [[nodiscard]] Eigen::Vector2cd p3() const { return {1.0, p32}; }
  [[nodiscard]] Eigen::RowVector2cd q1() const { return {D1, D1 * q12}; }
  [[nodiscard]] Eigen::RowVector2cd q3() const { return {D3, D3 * q32}; }
};

/// Cubic normal-form data for one index group, split into the direct cubic
/// part C, the part D routed through the center directions of the
/// second-order terms, and the complementary part E, normalized so that
/// total = C + 3/2 (D + E).
struct CubicTerm {
  std::complex<double> C, D, E, total;
};

struct HHCoefficients {
  std::complex<double> B11, B21, B13, B23;
  CubicTerm g2100, g1011, g0021, g1110;
};

struct Unfolding {
  int eps1 = 0;
  int eps2 = 0;
  int d0 = 0;
  double b0 = 0.0;
  double c0 = 0.0;
  double det = 0.0;  ///< d0 - b0 c0
  std::string case_label;
  /// Maps (mu1, mu2) = (tau - tau*, r0 - r0*) to (nu1, nu2).
  Eigen::Matrix2d nu_map = Eigen::Matrix2d::Zero();
};

enum class LineValidity { full, mu2_nonnegative, mu2_nonpositive };

/// A bifurcation line through the origin written as mu1 = slope * mu2.
struct BifurcationLine {
  std::string name;
  std::string meaning;
  double slope = 0.0;
  LineValidity validity = LineValidity::full;
};

struct Region {
  std::string label;
  double angle_from = 0.0;  ///< polar angle in the (mu1, mu2) plane, radians
  double angle_to = 0.0;
  std::string summary;      ///< equilibria of the amplitude system with physical stability
};

struct BifurcationSet {
  std::vector<BifurcationLine> lines;  ///< l1, l2 and whichever of l3, l5, l6 exist
  std::optional<BifurcationLine> l4;   ///< heteroclinic ray, when located
  std::vector<std::pair<double, double>> l4_samples;  ///< (mu1, mu2) points on l4
  std::vector<Region> regions;
};

enum class AmplitudeKind { origin, pure1, pure2, mixed };
enum class Stability { sink, source, saddle, nonhyperbolic };

struct AmplitudeEquilibrium {
  AmplitudeKind kind = AmplitudeKind::origin;
  double rho1 = 0.0;
  double rho2 = 0.0;
  std::array<std::complex<double>, 2> eigenvalues;  ///< in physical time
  Stability stability = Stability::nonhyperbolic;   ///< in physical time
};

struct AmplitudeTrajectory {
  std::vector<double> t;
  std::vector<double> rho1;
  std::vector<double> rho2;
};

[[nodiscard]] const char* to_string(AmplitudeKind k);
[[nodiscard]] const char* to_string(Stability s);

[[nodiscard]] HHEigendata hh_eigendata(const ModelParams& params_at_r0star, double tau_star,
                                       double omega_plus, double omega_minus, int k1 = 0,
                                       int k2 = 0);
[[nodiscard]] HHEigendata hh_eigendata(const ModelParams& params_base, const HopfHopfPoint& hh);

/// B11, B21 (mode 1) and B13, B23 (mode 2): derivatives of the critical
/// eigenvalues of the rescaled system with respect to tau and r0.
struct LinearUnfolding {
  std::complex<double> B11, B21, B13, B23;
};
[[nodiscard]] LinearUnfolding linear_B_coefficients(const HHEigendata& eig, const LocalModel& lm,
                                                    const R0Derivatives& dr0);

[[nodiscard]] HHCoefficients cubic_B_coefficients(const HHEigendata& eig, const LocalModel& lm);

/// Complete coefficient set at the Hopf-Hopf point.
[[nodiscard]] HHCoefficients hh_coefficients(const ModelParams& params_at_r0star,
                                             const HHEigendata& eig);

[[nodiscard]] std::string unfolding_case(int d0, double b0, double c0, double det);
[[nodiscard]] Unfolding unfolding(const HHCoefficients& coeffs);

[[nodiscard]] BifurcationSet bifurcation_lines(const Unfolding& u, bool locate_heteroclinic = true);

/// Equilibria of rho1' = rho1 (nu1 + rho1^2 + b0 rho2^2),
/// rho2' = rho2 (nu2 + c0 rho1^2 + d0 rho2^2), with stability reported in
/// physical time (the amplitude time runs backwards when eps1 = -1).
[[nodiscard]] std::vector<AmplitudeEquilibrium> amplitude_equilibria(const Unfolding& u, double nu1,
                                                                     double nu2);

/// Adaptive (Dormand-Prince, relative tolerance 1e-9) integration of the
/// amplitude flow in physical time.
[[nodiscard]] AmplitudeTrajectory amplitude_trajectory(const Unfolding& u, double nu1, double nu2,
                                                       std::pair<double, double> rho0, double t_end,
                                                       int n_out = 200);

/// Sign of the splitting between the unstable manifold of one pure-mode
/// saddle and the stable manifold of the other: -1 when the manifold returns
/// to the segment joining the mixed equilibrium and the target saddle, +1
/// when it escapes past the target, nullopt when the configuration does not
/// admit a connection or the integration is inconclusive.
[[nodiscard]] std::optional<int> heteroclinic_splitting(const Unfolding& u, double nu1, double nu2);

/// Direction (mu1, mu2) of the heteroclinic ray, found by bisection on the
/// splitting sign across the mixed-mode wedge.
[[nodiscard]] std::optional<std::pair<double, double>> locate_heteroclinic(const Unfolding& u);

/// Physical-time attractor of the amplitude system at (mu1, mu2):
/// "equilibrium", "periodic", "torus" or "other".
[[nodiscard]] std::string amplitude_attractor(const Unfolding& u, double mu1, double mu2);

}  // namespace fearbif
