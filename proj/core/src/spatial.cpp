#include "fearbif/spatial.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "fearbif/error.hpp"

namespace fearbif {

double neumann_mode(int k, double l, double x) {
  const double length = l * std::numbers::pi;
  if (k == 0) return 1.0 / std::sqrt(length);
  return std::sqrt(2.0 / length) * std::cos(k * x / l);
}

double mode_product_integral(std::span<const int> ks, double l) {
  if (ks.empty()) throw ValidationError("mode_product_integral: empty product");
  if (ks.size() > 24) throw ValidationError("mode_product_integral: product too long");
  const double length = l * std::numbers::pi;

  double norm = 1.0;
  for (int k : ks) {
    if (k < 0) throw ValidationError("mode_product_integral: negative wavenumber");
    norm *= k == 0 ? 1.0 / std::sqrt(length) : std::sqrt(2.0 / length);
  }

  // prod cos(k_i x/l) = 2^{-(n-1)} sum over signs of cos((k_1 +- k_2 ... +- k_n) x/l)
  const std::size_t rest = ks.size() - 1;
  std::int64_t zero_sums = 0;
  for (std::uint32_t mask = 0; mask < (1u << rest); ++mask) {
    std::int64_t sum = ks[0];
    for (std::size_t i = 0; i < rest; ++i) {
      sum += (mask >> i & 1u) ? -ks[i + 1] : ks[i + 1];
    }
    if (sum == 0) ++zero_sums;
  }
  return norm * length * std::ldexp(static_cast<double>(zero_sums), -static_cast<int>(rest));
}

double mode_product_integral(std::initializer_list<int> ks, double l) {
  return mode_product_integral(std::span<const int>(ks.begin(), ks.size()), l);
}

}  // namespace fearbif
