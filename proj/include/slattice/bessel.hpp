#ifndef SLATTICE_BESSEL_HPP
#define SLATTICE_BESSEL_HPP

#include <cmath>
#include <cstdlib>
#include <string>

#include "slattice/config.hpp"

namespace slattice {

/// Integer-order Bessel function of the first kind, J_n(x), for |n| <= 64
/// and |x| <= 100. Negative orders and arguments use J_{-n}(x) = (-1)^n J_n(x)
/// and J_n(-x) = (-1)^n J_n(x).
inline double bessel_j(int n, double x) {
  if (std::abs(n) > 64)
    throw ParameterError("bessel_j: order out of range: " + std::to_string(n));
  if (!std::isfinite(x) || std::abs(x) > 100.0)
    throw ParameterError("bessel_j: argument out of range");
  int sign = 1;
  if (n < 0) {
    n = -n;
    if (n % 2) sign = -sign;
  }
  if (x < 0.0) {
    x = -x;
    if (n % 2) sign = -sign;
  }
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  return sign * std::cyl_bessel_j(static_cast<double>(n), x);
}

}  // namespace slattice

#endif
