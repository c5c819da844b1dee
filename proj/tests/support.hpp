#pragma once

#include <cmath>
#include <complex>
#include <random>

#include "fearbif/model.hpp"

namespace fearbif::testing {

inline bool close_rel(double actual, double expected, double rel) {
  return std::abs(actual - expected) <= rel * std::abs(expected);
}

inline bool close_rel(std::complex<double> actual, std::complex<double> expected, double rel) {
  return close_rel(actual.real(), expected.real(), rel) && close_rel(actual.imag(), expected.imag(), rel);
}

/// Random parameter set for which the positive equilibrium exists.
inline ModelParams random_params(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto between = [&](double lo, double hi) { return lo + (hi - lo) * unit(gen); };
  ModelParams p;
  p.r2 = between(0.1, 1.0);
  p.K = between(0.0, 20.0);
  p.d = between(0.01, 0.1);
  p.a = between(0.01, 0.2);
  p.p = between(0.1, 1.5);
  p.c = between(0.1, 0.8);
  p.m = between(0.02, 0.5);
  p.d1 = between(0.05, 1.0);
  p.d2 = between(0.05, 1.0);
  p.l = between(2.0, 12.0);
  const double threshold = (p.a * p.r2 + p.c * p.d) / p.c;
  p.r0 = threshold * between(1.05, 4.0);
  return p;
}

}  // namespace fearbif::testing
