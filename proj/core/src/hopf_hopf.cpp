#include "fearbif/hopf_hopf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fearbif/delay_system.hpp"
#include "fearbif/error.hpp"
#include "fearbif/spatial.hpp"

namespace fearbif {

namespace {

constexpr cd kI(0.0, 1.0);

// One critical direction of the center subspace.
struct Direction {
  CVec2 v;
  CRow2 psi;
  cd lambda;
  int k;
  [[nodiscard]] PhaseSample sample() const { return PhaseSample::exponential(v, lambda); }
};

// Spatial mode n of a second-order term, split into its projection onto
// the critical directions living in mode n and the complement.
struct SecondOrderPart {
  int n;
  PhaseSample center;
  PhaseSample complement;
};

PhaseSample add(const PhaseSample& a, const PhaseSample& b, cd scale = 1.0) {
  return {a.now + scale * b.now, a.lagged + scale * b.lagged};
}

class CenterManifold {
 public:
  CenterManifold(const DelaySystem& sys, const std::array<Direction, 4>& dirs)
      : sys_(sys), dirs_(dirs) {}

  // Second-order term h_{ij} with forcing quadratic(phi_i, phi_j).
  [[nodiscard]] std::vector<SecondOrderPart> second_order(int i, int j) const {
    const Direction& a = dirs_[i];
    const Direction& b = dirs_[j];
    const cd mu = a.lambda + b.lambda;
    const CVec2 F = sys_.quadratic(a.sample(), b.sample());
    std::vector<int> modes{std::abs(a.k - b.k), a.k + b.k};
    std::sort(modes.begin(), modes.end());
    modes.erase(std::unique(modes.begin(), modes.end()), modes.end());

    std::vector<SecondOrderPart> parts;
    for (int n : modes) {
      const double c = mode_product_integral({a.k, b.k, n}, sys_.l());
      if (c == 0.0) continue;
      const CVec2 rhs = c * F;
      const CVec2 R = solve_guarded(sys_.characteristic_matrix(n, mu), rhs, "second-order resolvent");
      const PhaseSample full = PhaseSample::exponential(R, mu);
      PhaseSample center;
      for (const Direction& d : dirs_) {
        if (d.k != n) continue;
        const cd gap = mu - d.lambda;
        if (std::abs(gap) < 1e-8) {
          throw NumericalError("resonant Hopf-Hopf point: vanishing denominator i(n1 w+ + n2 w-) tau*");
        }
        const cd coef = (d.psi * rhs)(0) / gap;
        center = add(center, d.sample(), coef);
      }
      parts.push_back({n, center, add(full, center, -1.0)});
    }
    return parts;
  }

  struct Interaction {
    int with;  // direction index entering the quadratic form
    int i, j;  // second-order term h_{ij}
    double multiplicity;
  };

  // prefactor * psi_eq [ cubic(phi_a, phi_b, phi_c) I4 + sum of interactions ]
  [[nodiscard]] CubicTerm coefficient(int eq, std::array<int, 3> cubic_dirs,
                                      const std::vector<Interaction>& terms, double prefactor) const {
    const Direction& target = dirs_[eq];
    const double l = sys_.l();
    const double I4 = mode_product_integral(
        {target.k, dirs_[cubic_dirs[0]].k, dirs_[cubic_dirs[1]].k, dirs_[cubic_dirs[2]].k}, l);
    const CVec2 cubic = sys_.cubic(dirs_[cubic_dirs[0]].sample(), dirs_[cubic_dirs[1]].sample(),
                                   dirs_[cubic_dirs[2]].sample());

    CVec2 center_sum = CVec2::Zero();
    CVec2 complement_sum = CVec2::Zero();
    for (const Interaction& t : terms) {
      const Direction& with = dirs_[t.with];
      const auto [M0, M1] = sys_.interaction_matrices(with.sample());
      for (const SecondOrderPart& part : second_order(t.i, t.j)) {
        const double I3 = mode_product_integral({target.k, with.k, part.n}, l);
        if (I3 == 0.0) continue;
        center_sum += t.multiplicity * I3 * sys_.quadratic(with.sample(), part.center);
        complement_sum += t.multiplicity * I3 * (M0 * part.complement.now + M1 * part.complement.lagged);
      }
    }
    CubicTerm out;
    out.C = prefactor * (target.psi * cubic)(0) * I4;
    const cd center = prefactor * (target.psi * center_sum)(0);
    const cd complement = prefactor * (target.psi * complement_sum)(0);
    out.D = 2.0 / 3.0 * center;
    out.E = 2.0 / 3.0 * complement;
    out.total = out.C + 1.5 * (out.D + out.E);
    return out;
  }

 private:
  const DelaySystem& sys_;
  std::array<Direction, 4> dirs_;
};

int sign_of(double x, const char* what) {
  if (!(std::abs(x) > 1e-14)) {
    throw NumericalError(std::string("degenerate Hopf-Hopf unfolding: ") + what + " vanishes");
  }
  return x > 0.0 ? 1 : -1;
}

}  // namespace

HHEigendata hh_eigendata(const ModelParams& params, double tau_star, double omega_plus,
                         double omega_minus, int k1, int k2) {
  const LocalModel lm = local_model(params);
  const DelaySystem sys(lm, tau_star);

  HHEigendata eig;
  eig.r0_star = params.r0;
  eig.tau_star = tau_star;
  eig.omega_plus = omega_plus;
  eig.omega_minus = omega_minus;
  eig.k1 = k1;
  eig.k2 = k2;
  eig.p12 = sys.right_eigenvector(k1, omega_plus)(1);
  eig.q12 = sys.left_eigenvector(k1, omega_plus)(1);
  eig.p32 = sys.right_eigenvector(k2, omega_minus)(1);
  eig.q32 = sys.left_eigenvector(k2, omega_minus)(1);

  const cd lam1 = kI * omega_plus * tau_star;
  const cd lam3 = kI * omega_minus * tau_star;
  const cd den1 = 1.0 + eig.p12 * eig.q12 + tau_star * lm.lin.b11 * std::exp(-lam1);
  const cd den3 = 1.0 + eig.p32 * eig.q32 + tau_star * lm.lin.b11 * std::exp(-lam3);
  if (std::abs(den1) < 1e-12 || std::abs(den3) < 1e-12) {
    throw NumericalError("hh_eigendata: singular normalization");
  }
  eig.D1 = 1.0 / den1;
  eig.D3 = 1.0 / den3;

  eig.char_residual_1 = (sys.characteristic_matrix(k1, lam1) * eig.p1()).norm();
  eig.char_residual_3 = (sys.characteristic_matrix(k2, lam3) * eig.p3()).norm();

  auto psi_of = [](CRow2 q, cd lam) {
    return [q, lam](double s) -> CRow2 { return q * std::exp(-lam * s); };
  };
  auto phi_of = [](CVec2 p, cd lam) {
    return [p, lam](double th) -> CVec2 { return p * std::exp(lam * th); };
  };
  const auto psi1 = psi_of(eig.q1(), lam1);
  const auto psi3 = psi_of(eig.q3(), lam3);
  eig.normalization_residual_1 = std::abs(sys.bilinear_form(psi1, phi_of(eig.p1(), lam1)) - 1.0);
  eig.normalization_residual_3 = std::abs(sys.bilinear_form(psi3, phi_of(eig.p3(), lam3)) - 1.0);
  double cross = std::max(
      std::abs(sys.bilinear_form(psi1, phi_of(eig.p1().conjugate(), std::conj(lam1)))),
      std::abs(sys.bilinear_form(psi3, phi_of(eig.p3().conjugate(), std::conj(lam3)))));
  // Different wavenumbers are orthogonal in space, so only equal modes can pair.
  if (k1 == k2) {
    cross = std::max({cross, std::abs(sys.bilinear_form(psi1, phi_of(eig.p3(), lam3))),
                      std::abs(sys.bilinear_form(psi3, phi_of(eig.p1(), lam1)))});
  }
  eig.cross_residual = cross;
  return eig;
}

HHEigendata hh_eigendata(const ModelParams& base, const HopfHopfPoint& hh) {
  return hh_eigendata(base.with_r0(hh.r0_star), hh.tau_star, hh.omega_plus, hh.omega_minus, hh.k1,
                      hh.k2);
}

LinearUnfolding linear_B_coefficients(const HHEigendata& eig, const LocalModel& lm,
                                      const R0Derivatives& dr0) {
  const DelaySystem sys(lm, eig.tau_star);
  Eigen::Matrix2d A1, B1;
  A1 << 0.0, dr0.a12_hat, dr0.a21_hat, dr0.a22_hat;
  B1 << dr0.b11_hat, 0.0, 0.0, 0.0;
  const double l2 = lm.params.l * lm.params.l;

  auto contract = [&](const CRow2& q, const CVec2& p, int k, double omega) {
    const cd lag = std::exp(-kI * omega * eig.tau_star);
    const double kk = static_cast<double>(k) * k / l2;
    const CVec2 d_tau = (-kk * sys.diffusion() + sys.instantaneous()).cast<cd>() * p +
                        sys.delayed().cast<cd>() * p * lag;
    const CVec2 d_r0 = eig.tau_star * (A1.cast<cd>() * p + B1.cast<cd>() * p * lag);
    return std::pair{(q * d_tau)(0), (q * d_r0)(0)};
  };
  const auto [b11, b21] = contract(eig.q1(), eig.p1(), eig.k1, eig.omega_plus);
  const auto [b13, b23] = contract(eig.q3(), eig.p3(), eig.k2, eig.omega_minus);
  return {b11, b21, b13, b23};
}

HHCoefficients cubic_B_coefficients(const HHEigendata& eig, const LocalModel& lm) {
  const DelaySystem sys(lm, eig.tau_star);
  const cd lam1 = kI * eig.omega_plus * eig.tau_star;
  const cd lam3 = kI * eig.omega_minus * eig.tau_star;
  const std::array<Direction, 4> dirs{{
      {eig.p1(), eig.q1(), lam1, eig.k1},
      {eig.p1().conjugate(), eig.q1().conjugate(), std::conj(lam1), eig.k1},
      {eig.p3(), eig.q3(), lam3, eig.k2},
      {eig.p3().conjugate(), eig.q3().conjugate(), std::conj(lam3), eig.k2},
  }};
  const CenterManifold cm(sys, dirs);

  // Direction indices: 0 = phi1, 1 = conj phi1, 2 = phi3, 3 = conj phi3.
  HHCoefficients out;
  out.g2100 = cm.coefficient(0, {0, 0, 1}, {{1, 0, 0, 1.0}, {0, 0, 1, 2.0}}, 0.5);
  out.g1011 = cm.coefficient(0, {0, 2, 3}, {{0, 2, 3, 1.0}, {2, 0, 3, 1.0}, {3, 0, 2, 1.0}}, 1.0);
  out.g1110 = cm.coefficient(2, {0, 1, 2}, {{2, 0, 1, 1.0}, {0, 1, 2, 1.0}, {1, 0, 2, 1.0}}, 1.0);
  out.g0021 = cm.coefficient(2, {2, 2, 3}, {{3, 2, 2, 1.0}, {2, 2, 3, 2.0}}, 0.5);
  return out;
}

HHCoefficients hh_coefficients(const ModelParams& params, const HHEigendata& eig) {
  const LocalModel lm = local_model(params);
  HHCoefficients out = cubic_B_coefficients(eig, lm);
  const LinearUnfolding lin = linear_B_coefficients(eig, lm, r0_derivatives(params));
  out.B11 = lin.B11;
  out.B21 = lin.B21;
  out.B13 = lin.B13;
  out.B23 = lin.B23;
  return out;
}

std::string unfolding_case(int d0, double b0, double c0, double det) {
  const bool b = b0 > 0.0;
  const bool c = c0 > 0.0;
  const bool dp = det > 0.0;
  if (d0 > 0) {
    if (b && c) return dp ? "Ia" : "Ib";
    if (b && !c) return "II";
    if (!b && c) return "III";
    return dp ? "IVa" : "IVb";
  }
  if (b && c) return "V";
  if (b && !c) return dp ? "VIa" : "VIb";
  if (!b && c) return dp ? "VIIa" : "VIIb";
  return "VIII";
}

Unfolding unfolding(const HHCoefficients& h) {
  Unfolding u;
  const double r2100 = h.g2100.total.real();
  const double r0021 = h.g0021.total.real();
  u.eps1 = sign_of(r2100, "Re B2100");
  u.eps2 = sign_of(r0021, "Re B0021");
  u.d0 = u.eps1 * u.eps2;
  u.b0 = u.eps1 * u.eps2 * h.g1011.total.real() / r0021;
  u.c0 = h.g1110.total.real() / r2100;
  u.det = u.d0 - u.b0 * u.c0;
  u.case_label = unfolding_case(u.d0, u.b0, u.c0, u.det);
  u.nu_map << u.eps1 * h.B11.real(), u.eps1 * h.B21.real(), u.eps1 * h.B13.real(),
      u.eps1 * h.B23.real();
  return u;
}

}  // namespace fearbif
