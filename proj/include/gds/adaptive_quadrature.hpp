#pragma once

// Adaptive Gauss-Kronrod (7/15) integration by recursive interval splitting.
// This is the independent reference path for every Gaussian-weighted
// integral the library also evaluates by Gauss-Hermite sums or closed forms,
// so it deliberately shares no code with either.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace gds {

struct AdaptiveOptions
{
  double abs_tol = 1e-15;
  double rel_tol = 1e-14;
  int max_depth = 60;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// 7-point Gauss weights at kKronrodNodes[1], [3], [5], [7].
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
void gauss_kronrod_segment(F& f, double a, double b, double& kronrod, double& gauss)
{
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  const double fc = f(mid);
  kronrod = kKronrodWeights[7] * fc;
  gauss = kGaussWeights[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double pair = f(mid - dx) + f(mid + dx);
    kronrod += kKronrodWeights[i] * pair;
    if (i % 2 == 1)
      gauss += kGaussWeights[i / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
}

template <class F>
double adaptive_segment(F& f, double a, double b, double abs_tol, const AdaptiveOptions& opt,
                        int depth)
{
  double k = 0.0, g = 0.0;
  gauss_kronrod_segment(f, a, b, k, g);
  const double err = std::abs(k - g);
  if (depth >= opt.max_depth || err <= std::max(abs_tol, opt.rel_tol * std::abs(k)))
    return k;
  const double m = 0.5 * (a + b);
  return adaptive_segment(f, a, m, 0.5 * abs_tol, opt, depth + 1)
         + adaptive_segment(f, m, b, 0.5 * abs_tol, opt, depth + 1);
}

}  // namespace detail

/// Integrate f over [a, b].
template <class F>
double adaptive_integrate(F&& f, double a, double b, const AdaptiveOptions& opt = {})
{
  if (a == b)
    return 0.0;
  return detail::adaptive_segment(f, a, b, opt.abs_tol, opt, 0);
}

/// Truncation half-width for Gaussian-weighted integrals: exp(-L^2) < 1e-18.
inline constexpr double kGaussianCutoff = 6.5;

/// Reference value of  int g(v) phi(v) dv,  phi(v) = exp(-v^2)/sqrt(pi),
/// over (-L, L).  `breaks` are extra split points (e.g. near-singular
/// features of g); points outside (-L, L) are ignored.
template <class F>
double phi_weighted_integral(F&& g, std::vector<double> breaks = {},
                             const AdaptiveOptions& opt = {}, double half_width = kGaussianCutoff)
{
  auto integrand = [&g](double v) { return g(v) * std::exp(-v * v) * std::numbers::inv_sqrtpi; };
  breaks.push_back(-half_width);
  breaks.push_back(0.0);
  breaks.push_back(half_width);
  std::sort(breaks.begin(), breaks.end());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = std::clamp(breaks[i], -half_width, half_width);
    const double b = std::clamp(breaks[i + 1], -half_width, half_width);
    if (b > a)
      sum += adaptive_integrate(integrand, a, b, opt);
  }
  return sum;
}

}  // namespace gds
