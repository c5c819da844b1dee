#include "fearbif/delay_system.hpp"

#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "fearbif/error.hpp"

namespace fearbif {

DelaySystem::DelaySystem(const LocalModel& lm, double tau)
    : lin_(lm.lin), nl_(lm.nl), l_(lm.params.l), tau_(tau) {
  A_ << 0.0, lin_.a12, lin_.a21, lin_.a22;
  B_ << lin_.b11, 0.0, 0.0, 0.0;
  D_ << lm.params.d1, 0.0, 0.0, lm.params.d2;
}

CMat2 DelaySystem::characteristic_matrix(int n, cd lambda) const {
  const double kk = static_cast<double>(n) * n / (l_ * l_);
  const CMat2 L = (-kk * D_ + A_).cast<cd>() + B_.cast<cd>() * std::exp(-lambda);
  return lambda * CMat2::Identity() - tau_ * L;
}

CMat2 DelaySystem::characteristic_derivative(cd lambda) const {
  return CMat2::Identity() + tau_ * B_.cast<cd>() * std::exp(-lambda);
}

CVec2 DelaySystem::quadratic(const PhaseSample& x, const PhaseSample& y) const {
  const cd xu = x.now(0), xv = x.now(1), yu = y.now(0), yv = y.now(1);
  const cd xd = x.lagged(0), yd = y.lagged(0);
  const cd mixed = xu * yv + xv * yu;
  CVec2 out;
  out(0) = nl_.alpha1 * mixed - nl_.a * (xu * yd + xd * yu) + 2.0 * nl_.alpha2 * xv * yv;
  out(1) = nl_.c * mixed - 2.0 * nl_.m * xv * yv;
  return tau_ * out;
}

CVec2 DelaySystem::cubic(const PhaseSample& x, const PhaseSample& y, const PhaseSample& z) const {
  const cd xu = x.now(0), xv = x.now(1);
  const cd yu = y.now(0), yv = y.now(1);
  const cd zu = z.now(0), zv = z.now(1);
  CVec2 out;
  out(0) = 6.0 * nl_.alpha3 * xv * yv * zv + 2.0 * nl_.alpha4 * (xu * yv * zv + xv * yu * zv + xv * yv * zu);
  out(1) = 0.0;
  return tau_ * out;
}

std::pair<CMat2, CMat2> DelaySystem::interaction_matrices(const PhaseSample& x) const {
  CMat2 M0, M1;
  for (int i = 0; i < 2; ++i) {
    PhaseSample unit_now, unit_lag;
    unit_now.now(i) = 1.0;
    unit_lag.lagged(i) = 1.0;
    M0.col(i) = quadratic(x, unit_now);
    M1.col(i) = quadratic(x, unit_lag);
  }
  return {M0, M1};
}

CVec2 DelaySystem::right_eigenvector(int n, double omega) const {
  const double kk = static_cast<double>(n) * n / (l_ * l_);
  const cd den = cd(0.0, omega) + D_(1, 1) * kk - lin_.a22;
  return CVec2(1.0, lin_.a21 / den);
}

CRow2 DelaySystem::left_eigenvector(int n, double omega) const {
  const double kk = static_cast<double>(n) * n / (l_ * l_);
  const cd den = cd(0.0, omega) + D_(1, 1) * kk - lin_.a22;
  return CRow2(1.0, lin_.a12 / den);
}

cd DelaySystem::bilinear_form(const std::function<CRow2(double)>& psi,
                              const std::function<CVec2(double)>& phi) const {
  using Quadrature = boost::math::quadrature::gauss<double, 30>;
  const Eigen::Matrix2cd Bc = B_.cast<cd>();
  auto integrand = [&](double xi) -> cd { return (psi(xi + 1.0) * Bc * phi(xi))(0, 0); };
  constexpr int kPanels = 8;
  cd integral = 0.0;
  for (int i = 0; i < kPanels; ++i) {
    const double a = -1.0 + static_cast<double>(i) / kPanels;
    const double b = -1.0 + static_cast<double>(i + 1) / kPanels;
    integral += Quadrature::integrate(integrand, a, b);
  }
  return (psi(0.0) * phi(0.0))(0, 0) + tau_ * integral;
}

CVec2 solve_guarded(const CMat2& M, const CVec2& rhs, const char* what, double max_condition) {
  Eigen::JacobiSVD<CMat2> svd(M);
  const auto& sv = svd.singularValues();
  if (!(sv(1) > 0.0) || sv(0) / sv(1) > max_condition) {
    throw NumericalError(std::string(what) + ": singular 2x2 system (condition number above " +
                         std::to_string(max_condition) + ")");
  }
  return M.partialPivLu().solve(rhs);
}

}  // namespace fearbif
