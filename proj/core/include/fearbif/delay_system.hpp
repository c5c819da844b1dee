#pragma once

#include <complex>
#include <functional>
#include <utility>

#include <Eigen/Dense>

#include "fearbif/model.hpp"

namespace fearbif {

using cd = std::complex<double>;
using CVec2 = Eigen::Vector2cd;
using CRow2 = Eigen::RowVector2cd;
using CMat2 = Eigen::Matrix2cd;

/// A phase-space function evaluated at theta = 0 and theta = -1, which is
/// all the nonlinearity of the rescaled system ever looks at.
struct PhaseSample {
  CVec2 now = CVec2::Zero();
  CVec2 lagged = CVec2::Zero();

  /// Samples v exp(lambda theta).
  static PhaseSample exponential(const CVec2& v, cd lambda) {
    return {v, v * std::exp(-lambda)};
  }
  [[nodiscard]] PhaseSample conjugate() const { return {now.conjugate(), lagged.conjugate()}; }
};

/// The system at delay tau after rescaling time by tau, so that the delay
/// becomes 1. Spatial mode n contributes -n^2/l^2 D to the instantaneous
/// part. Nonlinear forms use the derivative convention
/// F(x) = 1/2 Q(x, x) + 1/6 K(x, x, x) + ...
class DelaySystem {
 public:
  DelaySystem(const LocalModel& lm, double tau);

  [[nodiscard]] double tau() const { return tau_; }
  [[nodiscard]] double l() const { return l_; }
  [[nodiscard]] const Eigen::Matrix2d& instantaneous() const { return A_; }
  [[nodiscard]] const Eigen::Matrix2d& delayed() const { return B_; }
  [[nodiscard]] const Eigen::Matrix2d& diffusion() const { return D_; }
  [[nodiscard]] const LinearCoeffs& lin() const { return lin_; }
  [[nodiscard]] const NonlinearCoeffs& nl() const { return nl_; }
  [[nodiscard]] double d2() const { return D_(1, 1); }

  /// Delta_n(lambda) = lambda I - tau (-n^2/l^2 D + A + B exp(-lambda)).
  [[nodiscard]] CMat2 characteristic_matrix(int n, cd lambda) const;
  /// d Delta_n / d lambda = I + tau B exp(-lambda).
  [[nodiscard]] CMat2 characteristic_derivative(cd lambda) const;

  /// Symmetric bilinear second-derivative form of the rescaled nonlinearity.
  [[nodiscard]] CVec2 quadratic(const PhaseSample& x, const PhaseSample& y) const;
  /// Symmetric trilinear third-derivative form.
  [[nodiscard]] CVec2 cubic(const PhaseSample& x, const PhaseSample& y, const PhaseSample& z) const;

  /// Matrices (M0, M1) with quadratic(x, w) = M0 w(0) + M1 w(-1).
  [[nodiscard]] std::pair<CMat2, CMat2> interaction_matrices(const PhaseSample& x) const;

  /// Right null vector (1, p) of Delta_n(i omega tau).
  [[nodiscard]] CVec2 right_eigenvector(int n, double omega) const;
  /// Left null vector (1, q) of Delta_n(i omega tau), unnormalized.
  [[nodiscard]] CRow2 left_eigenvector(int n, double omega) const;

  /// Numerical value of the pairing
  ///   (psi, phi) = psi(0) phi(0) + tau * int_{-1}^{0} psi(xi + 1) B phi(xi) d xi
  /// between a row-valued psi on [0, 1] and a column-valued phi on [-1, 0].
  [[nodiscard]] cd bilinear_form(const std::function<CRow2(double)>& psi,
                                 const std::function<CVec2(double)>& phi) const;

 private:
  LinearCoeffs lin_;
  NonlinearCoeffs nl_;
  Eigen::Matrix2d A_;
  Eigen::Matrix2d B_;
  Eigen::Matrix2d D_;
  double l_;
  double tau_;
};

/// Solves M x = rhs for a 2x2 system, throwing NumericalError when the
/// condition number exceeds `max_condition`.
[[nodiscard]] CVec2 solve_guarded(const CMat2& M, const CVec2& rhs, const char* what,
                                  double max_condition = 1e12);

}  // namespace fearbif
