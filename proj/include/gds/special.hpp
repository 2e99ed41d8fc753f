#pragma once

#include <cmath>
#include <limits>
#include <numbers>

namespace gds {

/// Scaled complementary error function erfcx(x) = exp(x^2) erfc(x), x >= 0.
///
/// Below x = 2 the product exp(x^2) erfc(x) is accurate to a few ulp.  Above
/// it the continued fraction
///
///     erfcx(x) = (1/sqrt(pi)) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
///
/// is evaluated with the modified Lentz method; it never forms exp(x^2), so
/// there is no overflow for large x.
inline double erfcx(double x)
{
  if (std::isnan(x))
    return x;
  if (x < 0.0)
    return 2.0 * std::exp(x * x) - erfcx(-x);
  if (x < 2.0)
    return std::exp(x * x) * std::erfc(x);
  if (x > 1e8)
    return std::numbers::inv_sqrtpi / x * (1.0 - 0.5 / (x * x));

  constexpr double tiny = 1e-300;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double f = x;
  double c = x;
  double d = 0.0;
  for (int n = 1; n < 10000; ++n) {
    const double a = 0.5 * n;
    d = x + a * d;
    if (d == 0.0)
      d = tiny;
    c = x + a / c;
    if (c == 0.0)
      c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < eps)
      break;
  }
  return std::numbers::inv_sqrtpi / f;
}

}  // namespace gds
