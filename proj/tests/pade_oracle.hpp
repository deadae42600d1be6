#pragma once

#include <cmath>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "fmes/schemes.hpp"

namespace fmes::testing {

using wide = boost::multiprecision::cpp_bin_float_50;

/// |R_lm(z) - exp(-z)| evaluated in 50-digit arithmetic from the library's
/// coefficients, so the error stays resolvable far below double round-off.
inline double pade_error(const PadeCoefficients& c, double z) {
  const wide zw(z);
  wide p = 0;
  for (auto it = c.p.rbegin(); it != c.p.rend(); ++it) p = p * zw + wide(*it);
  wide q = 0;
  for (auto it = c.q.rbegin(); it != c.q.rend(); ++it) q = q * zw + wide(*it);
  return static_cast<double>(abs(p / q - exp(-zw)));
}

/// Least-squares slope of log|R_lm - exp(-z)| against log z on a log grid.
inline double pade_error_slope(int l, int m, double z_lo = 1e-3, double z_hi = 1e-1, int samples = 21) {
  const PadeCoefficients c = pade_coefficients(l, m);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < samples; ++i) {
    const double x = std::log(z_lo) + (std::log(z_hi) - std::log(z_lo)) * i / (samples - 1);
    const double y = std::log(pade_error(c, std::exp(x)));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = samples;
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace fmes::testing
