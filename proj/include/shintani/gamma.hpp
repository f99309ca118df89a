#pragma once

#include <cmath>
#include <numbers>

#include "shintani/errors.hpp"

namespace shintani {

// Gamma for real positive arguments by the Lanczos approximation (g = 7, nine
// coefficients), with the reflection formula below 1/2.  Relative error is
// below 1e-12 across [1, 30], which the unit suite pins against tgamma.
inline double gamma_fn(double x) {
  if (std::isnan(x) || std::isinf(x))
    throw Error(ErrorKind::InvalidParameter, "gamma argument must be finite");
  if (x <= 0.0 && x == std::floor(x))
    throw Error(ErrorKind::InvalidParameter, "gamma pole at non-positive integer");

  static constexpr double g = 7.0;
  static constexpr double coeff[9] = {
      0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
      771.32342877765313,       -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7,
  };

  if (x < 0.5)
    return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma_fn(1.0 - x));

  const double z = x - 1.0;
  double a = coeff[0];
  for (int k = 1; k < 9; ++k) a += coeff[k] / (z + k);
  const double t = z + g + 0.5;
  return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

}  // namespace shintani
