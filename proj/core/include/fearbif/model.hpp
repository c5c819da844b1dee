#pragma once

#include <optional>
#include <utility>
#include <vector>

namespace fearbif {

/// Constants of the delayed diffusive predator-prey system
///
///   u_t = d1 u_xx + u (r0/(1+K v) - d - a u(t-tau) - p v)
///   v_t = d2 v_xx + v (-r2 + c u - m v)
///
/// on x in (0, l*pi) with homogeneous Neumann boundaries.
struct ModelParams {
  double r0 = 0.12;  ///< prey birth rate
  double r2 = 0.5;   ///< predator death rate
  double K = 10.0;   ///< level of fear
  double d = 0.04;   ///< prey natural death rate
  double a = 0.06;   ///< prey intraspecific competition
  double p = 0.8;    ///< capture rate
  double c = 0.4;    ///< conversion rate
  double m = 0.1;    ///< predator intraspecific competition
  double d1 = 0.3;   ///< prey diffusion
  double d2 = 0.5;   ///< predator diffusion
  double l = 10.0;   ///< domain scale, the domain is (0, l*pi)
  double tau = 0.0;  ///< maturation delay

  /// The reference parameter set used throughout the examples and tests.
  static ModelParams reference(double r0 = 0.12, double tau = 0.0);

  /// Throws ValidationError unless the rates are positive, K, d1, d2 are
  /// nonnegative and tau >= 0. K = 0 and zero diffusion are accepted as
  /// degenerate test inputs.
  void validate() const;

  [[nodiscard]] ModelParams with_r0(double value) const {
    ModelParams q = *this;
    q.r0 = value;
    return q;
  }
  [[nodiscard]] ModelParams with_tau(double value) const {
    ModelParams q = *this;
    q.tau = value;
    return q;
  }
};

enum class EquilibriumKind { extinct, boundary, positive };

struct Equilibrium {
  EquilibriumKind kind = EquilibriumKind::extinct;
  double u_star = 0.0;
  double v_star = 0.0;
};

/// Entries of the linearization at E*: the instantaneous matrix
/// [[0, a12], [a21, a22]] and the delayed matrix [[b11, 0], [0, 0]].
struct LinearCoeffs {
  double a12 = 0.0;
  double a21 = 0.0;
  double a22 = 0.0;
  double b11 = 0.0;
};

/// Taylor coefficients of the reaction terms at E* in shifted variables
/// (x, y) = (u - u*, v - v*), with xd the delayed prey deviation:
///
///   prey:     alpha1 x y + alpha2 y^2 + alpha3 y^3 + alpha4 x y^2 - a x xd
///   predator: c x y - m y^2
struct NonlinearCoeffs {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double alpha3 = 0.0;
  double alpha4 = 0.0;
  double a = 0.0;
  double c = 0.0;
  double m = 0.0;
};

/// Derivatives with respect to r0 of the positive equilibrium and of the
/// linearization entries.
struct R0Derivatives {
  double u_star_prime = 0.0;
  double v_star_prime = 0.0;
  double a12_hat = 0.0;
  double a21_hat = 0.0;
  double a22_hat = 0.0;
  double b11_hat = 0.0;
};

/// True iff a*r2 + c*d - c*r0 < 0, the strict existence condition for E*.
[[nodiscard]] bool check_h0(const ModelParams& params);

/// All constant equilibria; the positive one is present iff check_h0 holds.
[[nodiscard]] std::vector<Equilibrium> equilibria(const ModelParams& params);

/// The positive equilibrium, or nullopt when it does not exist.
[[nodiscard]] std::optional<Equilibrium> positive_equilibrium(const ModelParams& params);

/// Relative residual of the quadratic satisfied by v* at the given value.
[[nodiscard]] double equilibrium_quadratic_residual(const ModelParams& params, double v);

[[nodiscard]] LinearCoeffs linearize(const ModelParams& params, const Equilibrium& eq);

[[nodiscard]] NonlinearCoeffs nonlinear_coefficients(const ModelParams& params,
                                                     const Equilibrium& eq);

[[nodiscard]] R0Derivatives r0_derivatives(const ModelParams& params);

/// Reaction terms with the delayed prey equal to u (steady state).
[[nodiscard]] std::pair<double, double> rhs_residual(const ModelParams& params, double u, double v);

/// Reaction terms with an explicit delayed prey value.
[[nodiscard]] std::pair<double, double> reaction(const ModelParams& params, double u, double v,
                                                 double u_delayed);

/// Everything downstream computations need at a positive equilibrium.
struct LocalModel {
  ModelParams params;
  Equilibrium eq;
  LinearCoeffs lin;
  NonlinearCoeffs nl;
};

/// Builds the LocalModel; throws ValidationError when E* does not exist.
[[nodiscard]] LocalModel local_model(const ModelParams& params);

}  // namespace fearbif
