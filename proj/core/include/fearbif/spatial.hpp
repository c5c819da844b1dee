#pragma once

#include <initializer_list>
#include <span>

namespace fearbif {

/// Normalized Neumann eigenfunction on (0, l pi):
/// gamma_0 = 1/sqrt(l pi), gamma_k = sqrt(2/(l pi)) cos(k x / l).
[[nodiscard]] double neumann_mode(int k, double l, double x);

/// Exact value of the integral over (0, l pi) of the product of
/// gamma_{k_i}. Products of cosines expand into cosines of signed
/// wavenumber sums, and only vanishing sums survive integration.
[[nodiscard]] double mode_product_integral(std::span<const int> ks, double l);
[[nodiscard]] double mode_product_integral(std::initializer_list<int> ks, double l);

}  // namespace fearbif
